"""Kronecker canonical form of a matrix pair under (P, Q) equivalence.

The pair (G1, G2) is read as the pencil mu*G1 - G2. Invariants come from exact
ranks: minimal indices from the polynomial kernels of the pencil and its
transpose, elementary divisors from ranks of block-Toeplitz jet matrices.
Witnesses are obtained from the linear space of all (X, Y) with
X G_a = K_a Y, so no reduction step ever has to be undone.
"""

from dataclasses import dataclass
from enum import Enum
import logging
import random
from typing import Optional, Sequence

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from slocc.core.exact import (
    ONE,
    ZERO,
    ExactMatrix,
    Scalar,
    char_poly,
    factor_linear,
    field_key,
    format_scalar,
    gq,
    interpolate,
    determinant,
    invert,
    nullspace_rows,
    poly_gcd,
    random_gaussian_integer,
    rank,
    rref,
)
from slocc.core.state import MatrixPair
from slocc.errors import DimensionMismatch, IrreducibleFactor, WitnessVerificationError, ZeroPencil

logger = logging.getLogger(__name__)

_COMPRESSION_SEED = 0x5EED
_WITNESS_SEED = 0xC0FFEE


class BlockKind(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    INFINITE = "infinite"
    FINITE = "finite"


_KIND_RANK = {BlockKind.LEFT: 0, BlockKind.RIGHT: 1, BlockKind.INFINITE: 2, BlockKind.FINITE: 3}


@dataclass(frozen=True)
class JordanBlock:
    eigenvalue: Scalar
    size: int


@dataclass(frozen=True)
class PencilBlock:
    kind: BlockKind
    size: int
    eigenvalue: Optional[Scalar] = None

    @classmethod
    def finite(cls, eigenvalue, size: int) -> "PencilBlock":
        return cls(BlockKind.FINITE, size, gq(eigenvalue))

    @classmethod
    def infinite(cls, size: int) -> "PencilBlock":
        return cls(BlockKind.INFINITE, size)

    @classmethod
    def right(cls, epsilon: int) -> "PencilBlock":
        return cls(BlockKind.RIGHT, epsilon)

    @classmethod
    def left(cls, eta: int) -> "PencilBlock":
        return cls(BlockKind.LEFT, eta)

    @property
    def is_regular(self) -> bool:
        return self.kind in (BlockKind.FINITE, BlockKind.INFINITE)

    @property
    def dims(self) -> tuple[int, int]:
        if self.kind == BlockKind.RIGHT:
            return (self.size, self.size + 1)
        if self.kind == BlockKind.LEFT:
            return (self.size + 1, self.size)
        return (self.size, self.size)

    def sort_key(self) -> tuple:
        if self.kind == BlockKind.FINITE:
            re, im = field_key(self.eigenvalue)
            return (3, re, im, -self.size)
        if self.kind == BlockKind.INFINITE:
            return (2, -self.size, 0, 0)
        return (_KIND_RANK[self.kind], self.size, 0, 0)

    def layout(self) -> tuple[ExactMatrix, ExactMatrix]:
        """The block's pair (K1, K2) with pencil mu*K1 - K2."""
        n = self.size
        if self.kind == BlockKind.FINITE:
            shift = _shift(n)
            return ExactMatrix.identity(n), ExactMatrix.identity(n).scale(self.eigenvalue) + shift
        if self.kind == BlockKind.INFINITE:
            return _shift(n), ExactMatrix.identity(n)
        if self.kind == BlockKind.RIGHT:
            k1 = ExactMatrix(n, n + 1, (ONE if j == i else ZERO for i in range(n) for j in range(n + 1)))
            k2 = ExactMatrix(n, n + 1, (ONE if j == i + 1 else ZERO for i in range(n) for j in range(n + 1)))
            return k1, k2
        k1 = ExactMatrix(n + 1, n, (ONE if i == j else ZERO for i in range(n + 1) for j in range(n)))
        k2 = ExactMatrix(n + 1, n, (ONE if i == j + 1 else ZERO for i in range(n + 1) for j in range(n)))
        return k1, k2

    def label(self, point: Optional[str] = None) -> str:
        if self.kind == BlockKind.FINITE:
            return f"J{self.size}({point if point is not None else format_scalar(self.eigenvalue)})"
        if self.kind == BlockKind.INFINITE:
            return f"N{self.size}"
        if self.kind == BlockKind.RIGHT:
            return f"L{self.size}"
        return f"Lt{self.size}"

    def __str__(self) -> str:
        return self.label()


def _shift(n: int) -> ExactMatrix:
    return ExactMatrix(n, n, (ONE if j == i + 1 else ZERO for i in range(n) for j in range(n)))


def sort_blocks(blocks: Sequence[PencilBlock]) -> list[PencilBlock]:
    return sorted(blocks, key=lambda b: b.sort_key())


def block_layout(blocks: Sequence[PencilBlock]) -> tuple[ExactMatrix, ExactMatrix]:
    """Block-diagonal pair of the blocks in the given order."""
    layouts = [b.layout() for b in blocks]
    return (ExactMatrix.block_diag([k1 for k1, _ in layouts]),
            ExactMatrix.block_diag([k2 for _, k2 in layouts]))


@dataclass(frozen=True)
class PencilCanon:
    blocks: tuple[PencilBlock, ...]
    p_witness: ExactMatrix
    q_witness: ExactMatrix
    canon1: ExactMatrix
    canon2: ExactMatrix


# ==================== Rank invariants ====================

def _pencil_at(g1: ExactMatrix, g2: ExactMatrix, mu: Scalar) -> ExactMatrix:
    return g1.scale(mu) - g2


def _block_bidiagonal(a0: ExactMatrix, a1: ExactMatrix, k: int) -> ExactMatrix:
    r, c = a0.shape
    entries = [ZERO] * (k * r * k * c)
    width = k * c
    for block in range(k):
        for source, offset in ((a0, 0), (a1, -1)):
            col_block = block + offset
            if col_block < 0:
                continue
            for i in range(r):
                for j in range(c):
                    v = source[i, j]
                    if v:
                        entries[(block * r + i) * width + col_block * c + j] = v
    return ExactMatrix(k * r, k * c, entries)


def _kernel_toeplitz(g1: ExactMatrix, g2: ExactMatrix, k: int) -> ExactMatrix:
    """Coefficient map of degree-k polynomial vectors x(mu) -> (mu*g1 - g2) x(mu)."""
    r, c = g1.shape
    rows, cols = (k + 2) * r, (k + 1) * c
    entries = [ZERO] * (rows * cols)
    for j in range(k + 1):
        for source, row_block, sign in ((g2, j, -ONE), (g1, j + 1, ONE)):
            for a in range(r):
                for b in range(c):
                    v = source[a, b]
                    if v:
                        entries[(row_block * r + a) * cols + j * c + b] = sign * v
    return ExactMatrix(rows, cols, entries)


def _minimal_indices(g1: ExactMatrix, g2: ExactMatrix, normal_rank: int) -> list[int]:
    """Right minimal indices (degrees of a minimal polynomial kernel basis)."""
    count = g1.cols - normal_rank
    indices: list[int] = []
    previous_kernel = 0
    found_up_to_previous = 0
    k = 0
    while len(indices) < count:
        toeplitz = _kernel_toeplitz(g1, g2, k)
        kernel = toeplitz.cols - rank(toeplitz)
        # kernel(k) = sum over eps <= k of (k - eps + 1)
        at_most_k = kernel - previous_kernel
        indices.extend([k] * (at_most_k - found_up_to_previous))
        found_up_to_previous = at_most_k
        previous_kernel = kernel
        k += 1
        if k > g1.rows + 1 and len(indices) < count:
            raise WitnessVerificationError("minimal index computation did not terminate")
    return indices


def _sample_points(count: int) -> list[Scalar]:
    return [gq(k) for k in range(count)]


def normal_rank(g1: ExactMatrix, g2: ExactMatrix) -> int:
    return max(rank(_pencil_at(g1, g2, mu)) for mu in _sample_points(min(g1.shape) + 1))


def _regular_point(g1: ExactMatrix, g2: ExactMatrix, full: int) -> Scalar:
    for mu in _sample_points(min(g1.shape) + 2):
        if rank(_pencil_at(g1, g2, mu)) == full:
            return mu
    raise WitnessVerificationError("no regular point found for the pencil")


def _compressed_determinant(g1, g2, u: ExactMatrix, v: ExactMatrix, degree: int):
    points = _sample_points(degree + 1)
    values = [determinant(u @ _pencil_at(g1, g2, mu) @ v) for mu in points]
    return interpolate(points, values)


def _finite_eigenvalues(g1: ExactMatrix, g2: ExactMatrix, full: int) -> list[Scalar]:
    if full == 0:
        return []
    r, c = g1.shape
    if r == c == full:
        candidates_poly = _compressed_determinant(g1, g2, ExactMatrix.identity(r), ExactMatrix.identity(c), full)
        roots = [root for root, _ in factor_linear(candidates_poly)] if candidates_poly.degree > 0 else []
    else:
        rng = random.Random(_COMPRESSION_SEED)
        polys = []
        while len(polys) < 3:
            u = ExactMatrix(full, r, (random_gaussian_integer(rng, 3) for _ in range(full * r)))
            v = ExactMatrix(c, full, (random_gaussian_integer(rng, 3) for _ in range(c * full)))
            p = _compressed_determinant(g1, g2, u, v, full)
            if not p.is_zero():
                polys.append(p)
        common = poly_gcd(polys)
        if common.degree <= 0:
            return []
        try:
            roots = [root for root, _ in factor_linear(common)]
        except IrreducibleFactor:
            # spurious common factors vanish with further compressions
            for _ in range(3):
                u = ExactMatrix(full, r, (random_gaussian_integer(rng, 5) for _ in range(full * r)))
                v = ExactMatrix(c, full, (random_gaussian_integer(rng, 5) for _ in range(c * full)))
                p = _compressed_determinant(g1, g2, u, v, full)
                if not p.is_zero():
                    polys.append(p)
            common = poly_gcd(polys)
            roots = [root for root, _ in factor_linear(common)] if common.degree > 0 else []
    return [mu for mu in roots if rank(_pencil_at(g1, g2, mu)) < full]


def _jordan_sizes(a0_at, a0_ref, a1_at, a1_ref, limit: int) -> list[int]:
    """Sizes of the Jordan chains from rank deficits of jet matrices."""
    deficits = [0]
    k = 1
    while True:
        deficit = rank(_block_bidiagonal(a0_ref, a1_ref, k)) - rank(_block_bidiagonal(a0_at, a1_at, k))
        if deficit == deficits[-1] or k > limit:
            break
        deficits.append(deficit)
        k += 1
    at_least = [deficits[j] - deficits[j - 1] for j in range(1, len(deficits))] + [0]
    sizes = []
    for size in range(1, len(at_least)):
        sizes.extend([size] * (at_least[size - 1] - at_least[size]))
    return sizes


def pencil_blocks(g1: ExactMatrix, g2: ExactMatrix) -> list[PencilBlock]:
    """Complete strict-equivalence invariants of mu*g1 - g2, in canonical order."""
    if g1.shape != g2.shape:
        raise DimensionMismatch("pair matrices must share dimensions")
    if g1.is_zero() and g2.is_zero():
        raise ZeroPencil("both matrices of the pair are zero")

    full = normal_rank(g1, g2)
    blocks = [PencilBlock.right(e) for e in _minimal_indices(g1, g2, full)]
    blocks += [PencilBlock.left(e) for e in _minimal_indices(g1.T, g2.T, full)]

    reference = _regular_point(g1, g2, full)
    a0_ref = _pencil_at(g1, g2, reference)
    for mu in _finite_eigenvalues(g1, g2, full):
        for size in _jordan_sizes(_pencil_at(g1, g2, mu), a0_ref, g1, g1, full):
            blocks.append(PencilBlock.finite(mu, size))

    if rank(g1) < full:
        reversed_ref = None
        for s in _sample_points(min(g1.shape) + 2)[1:]:
            candidate = g1 - g2.scale(s)
            if rank(candidate) == full:
                reversed_ref = candidate
                break
        if reversed_ref is None:
            raise WitnessVerificationError("no regular point found for the reversed pencil")
        for size in _jordan_sizes(g1, reversed_ref, g2, g2, full):
            blocks.append(PencilBlock.infinite(size))

    blocks = sort_blocks(blocks)
    rows = sum(b.dims[0] for b in blocks)
    cols = sum(b.dims[1] for b in blocks)
    if (rows, cols) != g1.shape:
        raise WitnessVerificationError(
            f"block sizes {rows}x{cols} do not fill the {g1.rows}x{g1.cols} pencil"
        )
    return blocks


# ==================== Witnesses ====================

class EquivalenceSystem:
    """All pairs (X, Y) with X @ source_a = target_a @ Y for a = 1, 2.

    X ranges over the span of ``x_basis``. Rows of Y indexed by the nonzero
    columns of the stacked target are determined by X; the remaining rows are
    free.
    """

    def __init__(self, source: Sequence[ExactMatrix], target: Sequence[ExactMatrix]):
        self.source = tuple(source)
        self.target = tuple(target)
        if self.source[0].shape != self.target[0].shape:
            raise DimensionMismatch("source and target pairs differ in shape")
        r, c = self.target[0].shape
        self.rows, self.cols = r, c

        stacked = self.target[0].vstack(self.target[1])
        self.nonzero_cols = [j for j in range(c) if any(stacked[i, j] for i in range(2 * r))]
        self.free_rows = [j for j in range(c) if j not in self.nonzero_cols]

        if self.nonzero_cols:
            restricted = stacked.submatrix(range(2 * r), self.nonzero_cols)
            _, pivots = rref(restricted.T)
            self.pivot_rows = list(pivots)
            self.solve_matrix = invert(restricted.submatrix(self.pivot_rows, range(len(self.nonzero_cols))))
        else:
            self.pivot_rows = []
            self.solve_matrix = None

        self.x_basis = self._x_basis(stacked)

    def _x_basis(self, stacked: ExactMatrix) -> list[ExactMatrix]:
        r, c = self.rows, self.cols
        left_null = nullspace_rows(stacked.T)
        if not left_null:
            return [ExactMatrix(r, r, (ONE if k == e else ZERO for k in range(r * r))) for e in range(r * r)]
        g1, g2 = self.source
        coefficient_rows = []
        for vector in left_null:
            n1, n2 = vector[:r], vector[r:]
            for j in range(c):
                row = [ZERO] * (r * r)
                for u in range(r):
                    if not n1[u] and not n2[u]:
                        continue
                    for v in range(r):
                        row[u * r + v] = n1[u] * g1[v, j] + n2[u] * g2[v, j]
                coefficient_rows.append(row)
        solutions = nullspace_rows(ExactMatrix.from_rows(coefficient_rows))
        return [ExactMatrix(r, r, s) for s in solutions]

    def y_determined(self, x: ExactMatrix) -> ExactMatrix:
        """Rows of Y at the nonzero target columns, as a |nonzero| x cols matrix."""
        if self.solve_matrix is None:
            return ExactMatrix.zeros(0, self.cols)
        images = (x @ self.source[0]).vstack(x @ self.source[1])
        return self.solve_matrix @ images.submatrix(self.pivot_rows, range(self.cols))

    def assemble_y(self, determined: ExactMatrix, free: Optional[ExactMatrix] = None) -> ExactMatrix:
        rows: list[Optional[list[Scalar]]] = [None] * self.cols
        for k, j in enumerate(self.nonzero_cols):
            rows[j] = determined.row(k)
        for k, j in enumerate(self.free_rows):
            rows[j] = free.row(k) if free is not None else [ZERO] * self.cols
        return ExactMatrix.from_rows(rows, cols=self.cols)

    def complete_free_rows(self, determined: ExactMatrix) -> Optional[ExactMatrix]:
        """Unit rows making Y invertible, or None when the determined rows are dependent."""
        if rank(determined) != determined.rows:
            return None
        current = determined
        chosen = []
        for _ in self.free_rows:
            for k in range(self.cols):
                unit = ExactMatrix(1, self.cols, (ONE if j == k else ZERO for j in range(self.cols)))
                extended = current.vstack(unit)
                if rank(extended) == extended.rows:
                    current = extended
                    chosen.append(unit)
                    break
        if not chosen:
            return ExactMatrix.zeros(0, self.cols)
        result = chosen[0]
        for unit in chosen[1:]:
            result = result.vstack(unit)
        return result

    def instantiate(self, x: ExactMatrix) -> Optional[tuple[ExactMatrix, ExactMatrix]]:
        """(P, Q) with P source_a Q = target_a, or None if x gives no invertible pair."""
        if rank(x) != self.rows:
            return None
        determined = self.y_determined(x)
        free = self.complete_free_rows(determined)
        if free is None:
            return None
        y = self.assemble_y(determined, free)
        q = invert(y)
        return x, q

    def combination(self, coefficients: Sequence[Scalar]) -> ExactMatrix:
        result = ExactMatrix.zeros(self.rows, self.rows)
        for c, basis in zip(coefficients, self.x_basis):
            if c:
                result = result + basis.scale(c)
        return result

    def witness(self, attempts: int = 24, seed: int = _WITNESS_SEED) -> Optional[tuple[ExactMatrix, ExactMatrix]]:
        """Invertible (P, Q) in the family, or None when none exists.

        For invertible X the determined rows of Y have rank equal to the rank
        of the stacked source, so Y can be completed exactly when that rank
        covers the nonzero target columns. The remaining question is whether
        the span of ``x_basis`` meets GL; seeded trials answer it cheaply and
        the determinant polynomial settles it otherwise.
        """
        if not self.x_basis:
            return None
        if rank(self.source[0].vstack(self.source[1])) != len(self.nonzero_cols):
            return None
        trials = [[ONE] * len(self.x_basis)]
        rng = random.Random(seed)
        trials += [[random_gaussian_integer(rng, 3) for _ in self.x_basis] for _ in range(attempts)]
        for coefficients in trials:
            found = self._checked(self.combination(coefficients))
            if found is not None:
                return found
        coefficients = nonsingular_combination(self.x_basis)
        if coefficients is None:
            return None
        logger.debug(f"Witness from the determinant polynomial after {len(trials)} trials")
        found = self._checked(self.combination(coefficients))
        if found is None:
            raise WitnessVerificationError("nonsingular X did not complete to a witness")
        return found

    def _checked(self, x: ExactMatrix) -> Optional[tuple[ExactMatrix, ExactMatrix]]:
        found = self.instantiate(x)
        if found is None:
            return None
        p, q = found
        if all(p @ s @ q == t for s, t in zip(self.source, self.target)):
            return p, q
        return None


def nonsingular_combination(basis: Sequence[ExactMatrix]) -> Optional[list[Scalar]]:
    """Coefficients of an invertible member of span(basis), or None if every member is singular.

    Expands det(sum c_k B_k) over QQ_I[c] and fixes one coefficient at a
    time from 0..deg, skipping the finitely many values that would make the
    rest vanish identically.
    """
    n = basis[0].rows
    poly_ring, *gens = ring([f"c{k}" for k in range(len(basis))], QQ_I)
    entries = [[poly_ring.zero] * n for _ in range(n)]
    for gen, member in zip(gens, basis):
        for i in range(n):
            for j in range(n):
                if member[i, j]:
                    entries[i][j] += gen * member[i, j]
    det = DomainMatrix(entries, (n, n), poly_ring.to_domain()).det()
    if not det:
        return None
    values = []
    for gen in gens:
        for v in range(det.degree(gen) + 1):
            reduced = det.subs(gen, v)
            if reduced:
                det = reduced
                values.append(gq(v))
                break
    return values


def solve_equivalence(source: Sequence[ExactMatrix], target: Sequence[ExactMatrix],
                      attempts: int = 24) -> Optional[tuple[ExactMatrix, ExactMatrix]]:
    """Invertible (P, Q) with P source_a Q = target_a, or None if the pairs are inequivalent."""
    return EquivalenceSystem(source, target).witness(attempts)


def canonical_pair(g1: ExactMatrix, g2: ExactMatrix, attempts: int = 24) -> PencilCanon:
    blocks = pencil_blocks(g1, g2)
    canon1, canon2 = block_layout(blocks)
    found = solve_equivalence((g1, g2), (canon1, canon2), attempts)
    if found is None:
        raise WitnessVerificationError("could not build witnesses for the canonical pair")
    p, q = found
    logger.debug(f"Canonical pencil {' '.join(map(str, blocks))} for {g1.rows}x{g1.cols} pair")
    return PencilCanon(tuple(blocks), p, q, canon1, canon2)


def kcf(pair: MatrixPair, attempts: int = 24) -> PencilCanon:
    return canonical_pair(pair.gamma1, pair.gamma2, attempts)


def jordan_form(m: ExactMatrix, attempts: int = 24) -> tuple[list[JordanBlock], ExactMatrix]:
    """Blocks and similarity S with S^-1 m S block-diagonal Jordan."""
    if not m.is_square:
        raise DimensionMismatch("Jordan form of a non-square matrix")
    n = m.rows
    identity = ExactMatrix.identity(n)
    roots = factor_linear(char_poly(m))
    reference = next(gq(k) for k in range(n + 1) if all(gq(k) != root for root, _ in roots))
    a0_ref = identity.scale(reference) - m
    blocks = []
    for root, multiplicity in roots:
        sizes = _jordan_sizes(identity.scale(root) - m, a0_ref, identity, identity, n)
        if sum(sizes) != multiplicity:
            raise WitnessVerificationError("Jordan chain sizes disagree with eigenvalue multiplicity")
        blocks.extend(PencilBlock.finite(root, s) for s in sizes)
    blocks = sort_blocks(blocks)
    _, target = block_layout(blocks)
    found = solve_equivalence((identity, m), (identity, target), attempts)
    if found is None:
        raise WitnessVerificationError("could not build a Jordan similarity")
    _, similarity = found
    return [JordanBlock(b.eigenvalue, b.size) for b in blocks], similarity
