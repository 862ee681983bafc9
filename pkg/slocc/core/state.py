"""Four-partite states, their matrix-pair form and local operator action."""

from dataclasses import dataclass, field
from enum import Enum
import random
from typing import Iterator, Mapping, Optional, Sequence

from slocc.core.exact import (
    ONE,
    ZERO,
    ExactMatrix,
    Scalar,
    format_scalar,
    gq,
    invert,
    is_invertible,
    random_gaussian_integer,
    rank,
)
from slocc.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidState,
    NoQubitAxis,
    ParseError,
    Singular,
)
from slocc.parsers.literal import parse_scalar

Index = tuple[int, int, int, int]


class CompositeSide(str, Enum):
    COLUMNS = "columns"
    ROWS = "rows"


@dataclass(frozen=True)
class StateShape:
    dims: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.dims) != 4:
            raise DimensionMismatch(f"expected four particle dimensions, got {len(self.dims)}")
        if any(d < 1 for d in self.dims):
            raise DimensionMismatch(f"dimensions must be positive: {self.dims}")

    @classmethod
    def of(cls, *dims: int) -> "StateShape":
        if len(dims) == 1 and not isinstance(dims[0], int):
            dims = tuple(dims[0])
        return cls(tuple(int(d) for d in dims))

    def __iter__(self) -> Iterator[int]:
        return iter(self.dims)

    def __getitem__(self, axis: int) -> int:
        return self.dims[axis]

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.dims)

    def indices(self) -> Iterator[Index]:
        for i in range(1, self.dims[0] + 1):
            for l in range(1, self.dims[1] + 1):
                for m in range(1, self.dims[2] + 1):
                    for n in range(1, self.dims[3] + 1):
                        yield (i, l, m, n)


@dataclass(frozen=True)
class StateTensor:
    """Sparse amplitude tensor with 1-based indices; absent entries are zero."""

    shape: StateShape
    amplitudes: Mapping[Index, Scalar] = field(default_factory=dict)

    @classmethod
    def create(cls, shape: StateShape, amplitudes: Mapping[Sequence[int], Scalar]) -> "StateTensor":
        cleaned: dict[Index, Scalar] = {}
        for index, amp in amplitudes.items():
            index = tuple(int(k) for k in index)
            _check_index(index, shape)
            amp = gq(amp)
            if amp:
                cleaned[index] = amp
        return cls(shape, dict(sorted(cleaned.items())))

    def __getitem__(self, index: Sequence[int]) -> Scalar:
        return self.amplitudes.get(tuple(index), ZERO)

    @property
    def is_valid(self) -> bool:
        return bool(self.amplitudes)

    def require_valid(self) -> "StateTensor":
        if not self.is_valid:
            raise InvalidState("state has no nonzero amplitude")
        return self

    def scaled(self, factor) -> "StateTensor":
        factor = gq(factor)
        return StateTensor.create(self.shape, {k: factor * v for k, v in self.amplitudes.items()})

    def permuted(self, permutation: Sequence[int]) -> "StateTensor":
        """Reorder axes: new axis p is old axis permutation[p]."""
        shape = StateShape(tuple(self.shape[a] for a in permutation))
        amps = {tuple(index[a] for a in permutation): v for index, v in self.amplitudes.items()}
        return StateTensor.create(shape, amps)

    def to_ket(self) -> str:
        terms = []
        for index, amp in self.amplitudes.items():
            ket = "|" + ("".join(map(str, index)) if max(index) < 10 else ",".join(map(str, index))) + ">"
            if amp == ONE:
                terms.append(ket)
            else:
                terms.append(f"({format_scalar(amp)}){ket}")
        return " + ".join(terms) if terms else "0"


def _check_index(index: Sequence[int], shape: StateShape) -> None:
    if len(index) != 4:
        raise IndexOutOfRange(f"index {tuple(index)} does not address four particles")
    for axis, (k, d) in enumerate(zip(index, shape.dims)):
        if not 1 <= k <= d:
            raise IndexOutOfRange(f"index {tuple(index)} exceeds dimension {d} on particle {axis + 1}")


# ==================== Ket notation ====================

def _skip_spaces(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_index(body: str, start: int) -> tuple[int, ...]:
    if "," in body:
        parts = body.split(",")
    else:
        parts = list(body.strip())
    if not parts or any(not p.strip().isdigit() for p in parts):
        raise ParseError(f"invalid ket index '{body}'", start)
    return tuple(int(p) for p in parts)


def parse_ket(text: str, shape: StateShape) -> StateTensor:
    """Parse ``coeff|idx> + coeff|idx> ...``; repeated kets accumulate."""
    amplitudes: dict[Index, Scalar] = {}
    pos = _skip_spaces(text, 0)
    if pos == len(text):
        raise ParseError("empty ket expression", pos)

    first = True
    while pos < len(text):
        sign = ONE
        if text[pos] in "+-":
            sign = -ONE if text[pos] == "-" else ONE
            pos = _skip_spaces(text, pos + 1)
        elif not first:
            raise ParseError(f"expected '+' or '-' before next term, found '{text[pos]}'", pos)

        bar = text.find("|", pos)
        if bar < 0:
            raise ParseError("expected '|' opening a ket", pos)
        coeff_text = text[pos:bar].strip().rstrip("*").strip()
        if coeff_text.startswith("(") and coeff_text.endswith(")"):
            coeff_text = coeff_text[1:-1]
        coeff = parse_scalar(coeff_text, pos) if coeff_text else ONE

        close = text.find(">", bar)
        if close < 0:
            raise ParseError("unterminated ket, missing '>'", bar)
        index = _parse_index(text[bar + 1:close], bar + 1)
        if len(index) != 4:
            raise IndexOutOfRange(f"ket |{text[bar + 1:close]}> does not address four particles")
        _check_index(index, shape)

        amplitudes[index] = amplitudes.get(index, ZERO) + sign * coeff
        pos = _skip_spaces(text, close + 1)
        first = False

    return StateTensor.create(shape, amplitudes)


# ==================== Arrangement ====================

@dataclass(frozen=True)
class Arrangement:
    """Record of how the user's particles map onto (qubit, single, factor1, factor2)."""

    original_shape: StateShape
    permutation: tuple[int, int, int, int]  # arranged position -> original axis (0-based)
    composite_side: CompositeSide

    @property
    def qubit_axis(self) -> int:
        return self.permutation[0] + 1

    @property
    def single_axis(self) -> int:
        return self.permutation[1] + 1

    @property
    def arranged_shape(self) -> StateShape:
        return StateShape(tuple(self.original_shape[a] for a in self.permutation))

    def to_original(self, ops: "LocalOperatorQuad") -> "LocalOperatorQuad":
        ordered: list[Optional[ExactMatrix]] = [None] * 4
        for position, axis in enumerate(self.permutation):
            ordered[axis] = ops.operators[position]
        return LocalOperatorQuad(*ordered)

    def from_original(self, ops: "LocalOperatorQuad") -> "LocalOperatorQuad":
        return LocalOperatorQuad(*(ops.operators[axis] for axis in self.permutation))

    def restore(self, tensor: StateTensor) -> StateTensor:
        inverse = [0] * 4
        for position, axis in enumerate(self.permutation):
            inverse[axis] = position
        return tensor.permuted(inverse)


def composite_side_for(single_dim: int, m: int, n: int) -> CompositeSide:
    return CompositeSide.COLUMNS if single_dim < m * n else CompositeSide.ROWS


@dataclass(frozen=True)
class ArrangedState:
    tensor: StateTensor
    arrangement: Arrangement

    @property
    def shape(self) -> StateShape:
        return self.tensor.shape

    @property
    def composite_side(self) -> CompositeSide:
        return self.arrangement.composite_side

    @property
    def original(self) -> StateTensor:
        return self.arrangement.restore(self.tensor)

    def pair(self) -> "MatrixPair":
        return to_matrix_pair(self.tensor)


def choose_axes(shape: StateShape, qubit_axis: Optional[int] = None,
                single_axis: Optional[int] = None) -> tuple[int, int]:
    """Fill in missing axes: first qubit particle, then the largest remaining particle."""
    if qubit_axis is None:
        qubit_axis = next((a + 1 for a, d in enumerate(shape) if d == 2), None)
        if qubit_axis is None:
            raise NoQubitAxis(f"shape {shape} has no qubit particle")
    if single_axis is None:
        others = [a + 1 for a in range(4) if a + 1 != qubit_axis]
        single_axis = max(others, key=lambda a: (shape[a - 1], -a))
    return qubit_axis, single_axis


def arrange_axes(t: StateTensor, qubit_axis: Optional[int] = 1,
                 single_axis: Optional[int] = 2) -> ArrangedState:
    """Permute to (qubit, single, factor1, factor2); axes are 1-based, None picks automatically."""
    qubit_axis, single_axis = choose_axes(t.shape, qubit_axis, single_axis)
    if not (1 <= qubit_axis <= 4 and 1 <= single_axis <= 4) or qubit_axis == single_axis:
        raise NoQubitAxis(f"invalid axis choice qubit={qubit_axis} single={single_axis}")
    if t.shape[qubit_axis - 1] != 2:
        raise NoQubitAxis(
            f"particle {qubit_axis} has dimension {t.shape[qubit_axis - 1]}, expected a qubit"
        )
    q, s = qubit_axis - 1, single_axis - 1
    rest = [a for a in range(4) if a not in (q, s)]
    permutation = (q, s, rest[0], rest[1])
    arranged = t.permuted(permutation)
    side = composite_side_for(arranged.shape[1], arranged.shape[2], arranged.shape[3])
    return ArrangedState(arranged, Arrangement(t.shape, permutation, side))


# ==================== Matrix pairs ====================

@dataclass(frozen=True)
class MatrixPair:
    gamma1: ExactMatrix
    gamma2: ExactMatrix
    composite_side: CompositeSide
    factor_dims: tuple[int, int]
    single_dim: int

    def __post_init__(self):
        if self.gamma1.shape != self.gamma2.shape:
            raise DimensionMismatch("pair matrices must share dimensions")
        composite = self.factor_dims[0] * self.factor_dims[1]
        expected = ((self.single_dim, composite) if self.composite_side == CompositeSide.COLUMNS
                    else (composite, self.single_dim))
        if self.gamma1.shape != expected:
            raise DimensionMismatch(f"pair has shape {self.gamma1.shape}, expected {expected}")

    @property
    def matrices(self) -> tuple[ExactMatrix, ExactMatrix]:
        return (self.gamma1, self.gamma2)

    @property
    def shape(self) -> tuple[int, int]:
        return self.gamma1.shape

    def with_matrices(self, gamma1: ExactMatrix, gamma2: ExactMatrix) -> "MatrixPair":
        return MatrixPair(gamma1, gamma2, self.composite_side, self.factor_dims, self.single_dim)

    def apply(self, t: ExactMatrix, p: ExactMatrix, q: ExactMatrix) -> "MatrixPair":
        """Gamma'_a = sum_b t[a,b] * (p Gamma_b q)."""
        return self.with_matrices(*apply_route(self.matrices, t, p, q))


def apply_route(pair: Sequence[ExactMatrix], t: ExactMatrix, p: ExactMatrix,
                q: ExactMatrix) -> tuple[ExactMatrix, ExactMatrix]:
    if t.shape != (2, 2):
        raise DimensionMismatch("qubit operator must be 2x2")
    inner = [p @ g @ q for g in pair]
    return (
        inner[0].scale(t[0, 0]) + inner[1].scale(t[0, 1]),
        inner[0].scale(t[1, 0]) + inner[1].scale(t[1, 1]),
    )


def to_matrix_pair(t: StateTensor) -> MatrixPair:
    """Slice an arranged tensor along the qubit axis."""
    two, single, m, n = t.shape.dims
    if two != 2:
        raise NoQubitAxis("arranged tensor must have the qubit first")
    side = composite_side_for(single, m, n)
    composite = m * n
    slices = []
    for i in (1, 2):
        if side == CompositeSide.COLUMNS:
            entries = [ZERO] * (single * composite)
            for (a, l, mm, nn), v in t.amplitudes.items():
                if a == i:
                    entries[(l - 1) * composite + (mm - 1) * n + (nn - 1)] = v
            slices.append(ExactMatrix(single, composite, entries))
        else:
            entries = [ZERO] * (composite * single)
            for (a, l, mm, nn), v in t.amplitudes.items():
                if a == i:
                    entries[((mm - 1) * n + (nn - 1)) * single + (l - 1)] = v
            slices.append(ExactMatrix(composite, single, entries))
    return MatrixPair(slices[0], slices[1], side, (m, n), single)


def from_matrix_pair(pair: MatrixPair) -> StateTensor:
    m, n = pair.factor_dims
    shape = StateShape((2, pair.single_dim, m, n))
    amplitudes = {}
    for i, g in enumerate(pair.matrices, start=1):
        for r in range(g.rows):
            for c in range(g.cols):
                v = g[r, c]
                if not v:
                    continue
                l, composite = (r, c) if pair.composite_side == CompositeSide.COLUMNS else (c, r)
                amplitudes[(i, l + 1, composite // n + 1, composite % n + 1)] = v
    return StateTensor.create(shape, amplitudes)


# ==================== Local operators ====================

@dataclass(frozen=True)
class LocalOperatorQuad:
    a1: ExactMatrix
    a2: ExactMatrix
    a3: ExactMatrix
    a4: ExactMatrix

    @property
    def operators(self) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix, ExactMatrix]:
        return (self.a1, self.a2, self.a3, self.a4)

    @classmethod
    def identity(cls, shape: StateShape) -> "LocalOperatorQuad":
        return cls(*(ExactMatrix.identity(d) for d in shape))

    @classmethod
    def random(cls, shape: StateShape, rng: random.Random, bound: int = 2,
               gaussian: bool = True) -> "LocalOperatorQuad":
        return cls(*(ExactMatrix.random_invertible(d, rng, bound, gaussian) for d in shape))

    def inverse(self) -> "LocalOperatorQuad":
        return LocalOperatorQuad(*(invert(a) for a in self.operators))

    def after(self, other: "LocalOperatorQuad") -> "LocalOperatorQuad":
        """Quadruple acting as ``other`` first, then ``self``."""
        return LocalOperatorQuad(*(a @ b for a, b in zip(self.operators, other.operators)))


def _mode_product(amplitudes: dict, axis: int, op: ExactMatrix) -> dict:
    out: dict = {}
    for index, v in amplitudes.items():
        b = index[axis] - 1
        for a in range(op.rows):
            coeff = op[a, b]
            if not coeff:
                continue
            target = index[:axis] + (a + 1,) + index[axis + 1:]
            out[target] = out.get(target, ZERO) + coeff * v
    return {k: v for k, v in out.items() if v}


def apply_slocc(t: StateTensor, ops: LocalOperatorQuad) -> StateTensor:
    for axis, (op, d) in enumerate(zip(ops.operators, t.shape)):
        if op.shape != (d, d):
            raise DimensionMismatch(f"operator {axis + 1} is {op.rows}x{op.cols}, particle has dimension {d}")
        if not is_invertible(op):
            raise Singular(f"operator on particle {axis + 1} is not invertible")
    amplitudes = dict(t.amplitudes)
    for axis, op in enumerate(ops.operators):
        amplitudes = _mode_product(amplitudes, axis, op)
    return StateTensor.create(t.shape, amplitudes)


def flattening(t: StateTensor, axis: int) -> ExactMatrix:
    """Matrix with rows indexed by one particle (0-based axis) and columns by the rest."""
    others = [a for a in range(4) if a != axis]
    strides = []
    width = 1
    for a in reversed(others):
        strides.append((a, width))
        width *= t.shape[a]
    entries = [ZERO] * (t.shape[axis] * width)
    for index, v in t.amplitudes.items():
        col = sum((index[a] - 1) * s for a, s in strides)
        entries[(index[axis] - 1) * width + col] = v
    return ExactMatrix(t.shape[axis], width, entries)


def local_ranks(t: StateTensor) -> tuple[int, int, int, int]:
    return tuple(rank(flattening(t, axis)) for axis in range(4))


def random_state(shape: StateShape, entry_bound: int, seed, gaussian: bool = False) -> StateTensor:
    """Integer amplitudes in [0, bound], or Gaussian integers in [-bound, bound]^2."""
    rng = random.Random(seed)
    amplitudes = {}
    for index in shape.indices():
        if gaussian:
            amplitudes[index] = random_gaussian_integer(rng, entry_bound)
        else:
            amplitudes[index] = gq(rng.randint(0, entry_bound))
    return StateTensor.create(shape, amplitudes)
