import re

from sympy.polys.domains import QQ

from slocc.core.exact import Scalar, gq
from slocc.errors import ParseError

_RAT = r"\d+(?:/\d+)?"
_FULL = re.compile(rf"(?P<real>[+-]?{_RAT})(?:(?P<sign>[+-])(?P<imag>{_RAT})?i)?")
_IMAG_ONLY = re.compile(rf"(?P<sign>[+-]?)(?P<imag>{_RAT})?i")


def _to_rational(text: str, position: int):
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in '{text}'", position)
    return QQ(int(num), int(den) if den else 1)


def parse_scalar(text: str, position: int = 0) -> Scalar:
    """Parse a Gaussian-rational literal such as ``-1/2``, ``2+1/3i`` or ``-i``.

    ``position`` is the offset of ``text`` inside the enclosing input and is
    only used to annotate errors.
    """
    compact = "".join(text.split())
    if not compact:
        raise ParseError("empty coefficient", position)

    match = _FULL.fullmatch(compact)
    if match:
        real = _to_rational(match.group("real").lstrip("+"), position)
        if match.group("sign") is None:
            return gq(real)
        imag = _to_rational(match.group("imag") or "1", position)
        if match.group("sign") == "-":
            imag = -imag
        return gq(real, imag)

    match = _IMAG_ONLY.fullmatch(compact)
    if match:
        imag = _to_rational(match.group("imag") or "1", position)
        if match.group("sign") == "-":
            imag = -imag
        return gq(0, imag)

    raise ParseError(f"invalid Gaussian-rational literal '{text.strip()}'", position)
