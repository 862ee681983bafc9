"""Realignment test for Kronecker-product structure on the composite space."""

from dataclasses import dataclass
import logging
from typing import Any, Optional, Sequence

from slocc.core.exact import ExactMatrix, Scalar, inverse, rank
from slocc.errors import DimensionMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RealignmentShape:
    """An (m1*m2) x (n1*n2) operator cut into m1 x n1 blocks of size m2 x n2.

    Kronecker factors are left (m1 x n1) and right (m2 x n2); the realigned
    matrix is (m1*n1) x (m2*n2).
    """

    m1: int
    m2: int
    n1: int
    n2: int

    @classmethod
    def square(cls, m: int, n: int) -> "RealignmentShape":
        """Operators on C^m (x) C^n."""
        return cls(m, n, m, n)

    @property
    def operator_shape(self) -> tuple[int, int]:
        return (self.m1 * self.m2, self.n1 * self.n2)

    @property
    def realigned_shape(self) -> tuple[int, int]:
        return (self.m1 * self.n1, self.m2 * self.n2)


@dataclass(frozen=True)
class KroneckerFactors:
    left: ExactMatrix
    right: ExactMatrix

    def product(self) -> ExactMatrix:
        return self.left.kron(self.right)


def vec(block: Sequence[Sequence[Any]]) -> list[Any]:
    """Column-stacking vectorization."""
    rows, cols = len(block), len(block[0])
    return [block[i][j] for j in range(cols) for i in range(rows)]


def unvec(values: Sequence[Any], rows: int, cols: int) -> list[list[Any]]:
    return [[values[j * rows + i] for j in range(cols)] for i in range(rows)]


def realign_entries(entries: Sequence[Sequence[Any]], shape: RealignmentShape) -> list[list[Any]]:
    """Realignment of a dense array of ring elements.

    Blocks are enumerated column-major: row j*m1 + i holds vec(A_ij), so
    realign(A (x) B) = vec(A) vec(B)^T.
    """
    rows, cols = shape.operator_shape
    if len(entries) != rows or any(len(row) != cols for row in entries):
        raise DimensionMismatch(
            f"operator must be {rows}x{cols} to realign in {shape.m2}x{shape.n2} blocks"
        )
    m2, n2 = shape.m2, shape.n2
    realigned = []
    for j in range(shape.n1):
        for i in range(shape.m1):
            block = [[entries[i * m2 + a][j * n2 + b] for b in range(n2)] for a in range(m2)]
            realigned.append(vec(block))
    return realigned


def realign(x: ExactMatrix, shape: RealignmentShape) -> ExactMatrix:
    return ExactMatrix.from_rows(realign_entries(x.to_rows(), shape), cols=shape.m2 * shape.n2)


def is_kronecker(x: ExactMatrix, shape: RealignmentShape) -> bool:
    return rank(realign(x, shape)) == 1


def _pivot(r: ExactMatrix) -> Optional[tuple[int, int]]:
    for i in range(r.rows):
        for j in range(r.cols):
            if r[i, j]:
                return i, j
    return None


def rank_one_factor(x: ExactMatrix, shape: RealignmentShape) -> Optional[KroneckerFactors]:
    """Factors (A, B) with x = A (x) B, first nonzero entry of A equal to 1.

    Returns None unless the realignment has rank exactly one.
    """
    r = realign(x, shape)
    if rank(r) != 1:
        return None
    i0, j0 = _pivot(r)
    left = ExactMatrix.from_rows(unvec(r.column_values(j0), shape.m1, shape.n1))
    scale = inverse(r[i0, j0])
    right = ExactMatrix.from_rows(unvec([v * scale for v in r.row(i0)], shape.m2, shape.n2))

    lead = _first_nonzero(left)
    left, right = left.scale(inverse(lead)), right.scale(lead)
    factors = KroneckerFactors(left, right)
    if factors.product() != x:
        logger.warning("Rank-one realignment did not reproduce the operator")
        return None
    return factors


def _first_nonzero(m: ExactMatrix) -> Scalar:
    return next(m[i, j] for i in range(m.rows) for j in range(m.cols) if m[i, j])
