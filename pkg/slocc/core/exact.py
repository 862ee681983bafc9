"""Exact arithmetic over the Gaussian rationals and dense linear algebra.

Scalars are sympy ``QQ_I`` elements. Matrices are immutable row-major tuples
that delegate elimination to ``DomainMatrix``.
"""

from collections import Counter
from fractions import Fraction
import random
from typing import Iterable, Optional, Sequence, Union

from sympy import Poly, Symbol
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from slocc.errors import DimensionMismatch, IrreducibleFactor, Singular

Scalar = GaussianRational
ScalarLike = Union[int, Fraction, GaussianRational]

ZERO = QQ_I.zero
ONE = QQ_I.one
IMAG_UNIT = QQ_I(0, 1)

_X = Symbol("x")


# ==================== Scalars ====================

def _rational(value):
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def gq(re: ScalarLike = 0, im: Union[int, Fraction] = 0) -> Scalar:
    """Build a Gaussian rational from real and imaginary parts."""
    if isinstance(re, GaussianRational):
        return re if not im else re + QQ_I(0, _rational(im))
    return QQ_I(_rational(re), _rational(im))


def inverse(z: Scalar) -> Scalar:
    if not z:
        raise ZeroDivisionError("inverse of zero")
    norm = z.x * z.x + z.y * z.y
    return QQ_I(z.x / norm, -z.y / norm)


def div(a: Scalar, b: Scalar) -> Scalar:
    return a * inverse(b)


def field_key(z: Scalar) -> tuple:
    """Total order on Q(i): lexicographic on (re, im)."""
    return (z.x, z.y)


def _format_rational(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(z: Scalar) -> str:
    """Render as a Gaussian-rational literal, e.g. ``2+1/3i``."""
    re, im = z.x, z.y
    if not im:
        return _format_rational(re)
    magnitude = "" if abs(im) == 1 else _format_rational(abs(im))
    if not re:
        return f"{'-' if im < 0 else ''}{magnitude}i"
    return f"{_format_rational(re)}{'-' if im < 0 else '+'}{magnitude}i"


def random_gaussian_integer(rng: random.Random, bound: int, gaussian: bool = True) -> Scalar:
    re = rng.randint(-bound, bound)
    im = rng.randint(-bound, bound) if gaussian else 0
    return gq(re, im)


# ==================== Matrices ====================

class ExactMatrix:
    """Immutable dense matrix over Q(i)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[Scalar]):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # ---- construction ----

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ScalarLike]], cols: Optional[int] = None) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged matrix rows")
        return cls(len(rows), width, (gq(v) for r in rows for v in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.diag([ONE] * n)

    @classmethod
    def diag(cls, values: Sequence[ScalarLike]) -> "ExactMatrix":
        n = len(values)
        entries = [ZERO] * (n * n)
        for k, v in enumerate(values):
            entries[k * n + k] = gq(v)
        return cls(n, n, entries)

    @classmethod
    def column(cls, values: Sequence[ScalarLike]) -> "ExactMatrix":
        return cls(len(values), 1, (gq(v) for v in values))

    @classmethod
    def block_diag(cls, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        entries = [ZERO] * (rows * cols)
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    entries[(r0 + i) * cols + c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return cls(rows, cols, entries)

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "ExactMatrix":
        rows, cols = dm.shape
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols)
        ddm = dm.convert_to(QQ_I).rep.to_ddm()
        return cls(rows, cols, (v for r in ddm for v in r))

    @classmethod
    def random_invertible(cls, n: int, rng: random.Random, bound: int = 2,
                          gaussian: bool = True) -> "ExactMatrix":
        while True:
            m = cls(n, n, (random_gaussian_integer(rng, bound, gaussian) for _ in range(n * n)))
            if rank(m) == n:
                return m

    # ---- access ----

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> Scalar:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Scalar]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column_values(self, j: int) -> list[Scalar]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def to_rows(self) -> list[list[Scalar]]:
        return [self.row(i) for i in range(self.rows)]

    def to_domain(self) -> DomainMatrix:
        if self.rows == 0 or self.cols == 0:
            return DomainMatrix.zeros(self.shape, QQ_I)
        return DomainMatrix(self.to_rows(), self.shape, QQ_I)

    def is_zero(self) -> bool:
        return not any(self.entries)

    # ---- algebra ----

    def _check_same_shape(self, other: "ExactMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(self.rows, self.cols, (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, (-a for a in self.entries))

    def scale(self, factor: ScalarLike) -> "ExactMatrix":
        factor = gq(factor)
        return ExactMatrix(self.rows, self.cols, (factor * a for a in self.entries))

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if 0 in (self.rows, self.cols, other.cols):
            return ExactMatrix.zeros(self.rows, other.cols)
        return ExactMatrix.from_domain(self.to_domain() * other.to_domain())

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows,
                           (self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        rows, cols = self.rows * other.rows, self.cols * other.cols
        entries = [ZERO] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        entries[(i * other.rows + k) * cols + j * other.cols + l] = a * other[k, l]
        return ExactMatrix(rows, cols, entries)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(len(row_idx), len(col_idx), (self[i, j] for i in row_idx for j in col_idx))

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise DimensionMismatch("vstack needs equal column counts")
        return ExactMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    # ---- comparison ----

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.shape, self.entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_scalar(v) for v in r) for r in self.to_rows())
        return f"ExactMatrix({self.rows}x{self.cols}: {body})"


# ==================== Polynomials ====================

class ExactPoly:
    """Univariate polynomial over Q(i), coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[ScalarLike]):
        coeffs = [gq(c) for c in coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_roots(cls, roots: Iterable[ScalarLike]) -> "ExactPoly":
        poly = cls([ONE])
        for r in roots:
            poly = poly * cls([-gq(r), ONE])
        return poly

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: ScalarLike) -> Scalar:
        x = gq(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "ExactPoly") -> "ExactPoly":
        if self.is_zero() or other.is_zero():
            return ExactPoly([])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return ExactPoly(out)

    def monic(self) -> "ExactPoly":
        lead = inverse(self.coeffs[-1])
        return ExactPoly(c * lead for c in self.coeffs)

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coeffs)) or [ZERO], _X, domain=QQ_I)

    @classmethod
    def from_sympy(cls, poly: Poly) -> "ExactPoly":
        return cls(QQ_I.from_sympy(c) for c in reversed(poly.all_coeffs()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ExactPoly([{', '.join(format_scalar(c) for c in self.coeffs)}])"


# ==================== Operations ====================

def rank(m: ExactMatrix) -> int:
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    return m.to_domain().rank()


def determinant(m: ExactMatrix) -> Scalar:
    if not m.is_square:
        raise DimensionMismatch("determinant of a non-square matrix")
    if m.rows == 0:
        return ONE
    return m.to_domain().det()


def invert(m: ExactMatrix) -> ExactMatrix:
    if not m.is_square:
        raise DimensionMismatch(f"cannot invert a {m.rows}x{m.cols} matrix")
    try:
        return ExactMatrix.from_domain(m.to_domain().inv())
    except DMNonInvertibleMatrixError as e:
        raise Singular("matrix is not invertible") from e


def is_invertible(m: ExactMatrix) -> bool:
    return m.is_square and rank(m) == m.rows


def nullspace_rows(m: ExactMatrix) -> list[list[Scalar]]:
    """Reduced-echelon basis of the right nullspace, one vector per list."""
    if m.cols == 0:
        return []
    if m.rows == 0 or m.is_zero():
        return [[ONE if j == k else ZERO for j in range(m.cols)] for k in range(m.cols)]
    basis = m.to_domain().nullspace()
    if basis.shape[0] == 0:
        return []
    return [list(r) for r in basis.convert_to(QQ_I).rep.to_ddm()]


def nullspace(m: ExactMatrix) -> ExactMatrix:
    """Columns of the result form an exact basis of ker m."""
    vectors = nullspace_rows(m)
    if not vectors:
        return ExactMatrix.zeros(m.cols, 0)
    return ExactMatrix.from_rows(vectors).transpose()


def rref(m: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return m, ()
    reduced, pivots = m.to_domain().rref()
    return ExactMatrix.from_domain(reduced), tuple(pivots)


def char_poly(m: ExactMatrix) -> ExactPoly:
    if not m.is_square:
        raise DimensionMismatch("characteristic polynomial of a non-square matrix")
    if m.rows == 0:
        return ExactPoly([ONE])
    return ExactPoly(reversed(m.to_domain().charpoly()))


def factor_linear(p: ExactPoly) -> list[tuple[Scalar, int]]:
    """Roots with multiplicities; every irreducible factor must be linear."""
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if p.degree == 0:
        return []
    _, factors = p.to_sympy().factor_list()
    roots: Counter = Counter()
    for factor, multiplicity in factors:
        if factor.degree() != 1:
            raise IrreducibleFactor(
                f"factor {factor.as_expr()} of degree {factor.degree()} has no root in Q(i)"
            )
        a, b = (QQ_I.from_sympy(c) for c in factor.all_coeffs())
        roots[-div(b, a)] += multiplicity
    return sorted(roots.items(), key=lambda item: field_key(item[0]))


def rational_roots(p: ExactPoly) -> list[Scalar]:
    """Roots in Q(i) of p, ignoring factors without one."""
    if p.degree <= 0:
        return []
    _, factors = p.to_sympy().factor_list()
    roots = []
    for factor, _ in factors:
        if factor.degree() == 1:
            a, b = (QQ_I.from_sympy(c) for c in factor.all_coeffs())
            roots.append(-div(b, a))
    return sorted(set(roots), key=field_key)


def poly_gcd(polys: Sequence[ExactPoly]) -> ExactPoly:
    result = polys[0].to_sympy()
    for p in polys[1:]:
        result = result.gcd(p.to_sympy())
    return ExactPoly.from_sympy(result)


def interpolate(points: Sequence[Scalar], values: Sequence[Scalar]) -> ExactPoly:
    """Unique polynomial of degree < len(points) through the given values."""
    n = len(points)
    vandermonde = ExactMatrix(n, n, (x_power for x in points for x_power in _powers(x, n)))
    coeffs = invert(vandermonde) @ ExactMatrix.column(list(values))
    return ExactPoly(coeffs.entries)


def _powers(x: Scalar, n: int) -> list[Scalar]:
    out, acc = [], ONE
    for _ in range(n):
        out.append(acc)
        acc = acc * x
    return out
