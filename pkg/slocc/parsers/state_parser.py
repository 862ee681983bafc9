import re

from pydantic import ValidationError

from slocc.core.exact import ZERO
from slocc.core.state import StateShape, StateTensor, parse_ket
from slocc.errors import ParseError
from slocc.models.requests import StateFileModel
from slocc.parsers.base import BaseParser, JSONParser, ParsedState
from slocc.parsers.literal import parse_scalar

_KET = re.compile(r"\|([^>]*)>")
_HEADER = re.compile(r"^\s*(shape|qubit_axis|single_axis)\s*[:=]\s*(.*?)\s*$", re.IGNORECASE)


def pad_ket_indices(text: str) -> str:
    """Append a trivial fourth index to every three-particle ket."""

    def pad(match: re.Match) -> str:
        body = match.group(1)
        return f"|{body},1>" if "," in body else f"|{body.strip()}1>"

    return _KET.sub(pad, text)


def state_from_model(model: StateFileModel, source: str = "") -> ParsedState:
    shape = StateShape(tuple(model.shape))
    if model.ket:
        ket = pad_ket_indices(model.ket) if _is_three_particle_ket(model.ket) else model.ket
        tensor = parse_ket(ket, shape)
    else:
        amplitudes = {}
        for k, term in enumerate(model.terms):
            index = tuple(term.idx)
            amplitudes[index] = amplitudes.get(index, ZERO) + parse_scalar(term.amp, k)
        tensor = StateTensor.create(shape, amplitudes)
    return ParsedState(tensor.require_valid(), model.qubit_axis, model.single_axis, source)


def _is_three_particle_ket(text: str) -> bool:
    first = _KET.search(text)
    if first is None:
        return False
    body = first.group(1)
    return len(body.split(",") if "," in body else body.strip()) == 3


class StateJSONParser(JSONParser[ParsedState]):
    """State files in JSON: shape, optional axes and terms or a ket string."""

    def parse_data(self, data: dict, source: str = "") -> ParsedState:
        try:
            model = StateFileModel.model_validate(data)
        except ValidationError as e:
            raise ParseError(f"{source or 'state'}: {e.errors()[0]['msg']}")
        return state_from_model(model, source)


class KetParser(BaseParser[ParsedState]):
    """Ket text files.

    A ``shape:`` header line (``2 2 2 4`` or ``2x2x2x4``), optional
    ``qubit_axis:``/``single_axis:`` lines, ``#`` comments, and the ket
    expression over the remaining lines.
    """

    suffixes = ("ket", "txt")

    def parse_text(self, text: str, source: str = "") -> ParsedState:
        header: dict[str, str] = {}
        body = []
        for line in text.splitlines():
            line = line.split("#", 1)[0]
            match = _HEADER.match(line)
            if match:
                header[match.group(1).lower()] = match.group(2)
            elif line.strip():
                body.append(line.strip())

        if "shape" not in header:
            raise ParseError(f"{source or 'ket'}: missing 'shape:' header line")
        try:
            data = {
                "shape": [int(d) for d in re.split(r"[\sx,]+", header["shape"]) if d],
                "ket": " ".join(body),
            }
            for key in ("qubit_axis", "single_axis"):
                if key in header:
                    data[key] = int(header[key])
        except ValueError:
            raise ParseError(f"{source or 'ket'}: header values must be integers")

        try:
            model = StateFileModel.model_validate(data)
        except ValidationError as e:
            raise ParseError(f"{source or 'ket'}: {e.errors()[0]['msg']}")
        return state_from_model(model, source)
