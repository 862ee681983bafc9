from pydantic import ValidationError

from slocc.core.census import CensusTable, table_from_entries
from slocc.errors import ParseError
from slocc.models.requests import OmegaFileModel
from slocc.parsers.base import JSONParser


class OmegaTableParser(JSONParser[CensusTable]):
    """Omega table files: individual entries and aggregate tail sums."""

    def parse_data(self, data: dict, source: str = "") -> CensusTable:
        try:
            model = OmegaFileModel.model_validate(data)
        except ValidationError as e:
            raise ParseError(f"{source or 'omega table'}: {e.errors()[0]['msg']}")
        try:
            return table_from_entries(
                [(e.L, e.i, e.count) for e in model.omega],
                [(t.L, t.start, t.stop, t.count) for t in model.tail_sums],
            )
        except ValueError as e:
            raise ParseError(f"{source or 'omega table'}: {e}")
