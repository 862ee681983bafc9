"""Input parsers. Import concrete parsers from their modules."""
