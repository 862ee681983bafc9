"""Feasibility of rank-one realignment over a linear family of operators.

A family Z(t) = sum_p t_p Z_p realigns to a matrix of linear forms; it has
rank one exactly where every 2x2 minor (a quadric in t) vanishes. Two exact
strategies are tried before giving up: a binomial solver on the torus (all
parameters nonzero) and a linearization of the quadrics.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Optional, Sequence

from sympy.polys.domains import QQ_I, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp
from sympy.polys.rings import PolyElement, ring

from slocc.core.exact import (
    ONE,
    ZERO,
    ExactMatrix,
    ExactPoly,
    Scalar,
    div,
    factor_linear,
    format_scalar,
    gq,
    interpolate,
    inverse,
    nullspace_rows,
    poly_gcd,
    rank,
    rational_roots,
    rref,
)
from slocc.core.realign import RealignmentShape, realign
from slocc.errors import IrreducibleFactor

logger = logging.getLogger(__name__)

_PENCIL_LIMIT = 8


class MinorOutcome(str, Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    UNDECIDED = "undecided"


@dataclass
class MinorResult:
    outcome: MinorOutcome
    method: str
    values: Optional[list[Scalar]] = None
    certificate: Optional[str] = None
    detail: str = ""
    candidates: list[list[Scalar]] = field(default_factory=list)
    exhaustive: bool = False

    @classmethod
    def solved(cls, method: str, candidates: list[list[Scalar]], exhaustive: bool) -> "MinorResult":
        return cls(MinorOutcome.SOLVED, method, values=candidates[0], candidates=candidates, exhaustive=exhaustive)


@dataclass(frozen=True)
class LinearFamily:
    """Operators sum_p t_p * generators[p]."""

    names: tuple[str, ...]
    generators: tuple[ExactMatrix, ...]

    def instantiate(self, values: Sequence[Scalar]) -> ExactMatrix:
        n = self.generators[0].rows
        result = ExactMatrix.zeros(n, n)
        for v, g in zip(values, self.generators):
            if v:
                result = result + g.scale(v)
        return result


# ==================== Integer Smith form ====================

def smith_form(a: list[list[int]]) -> tuple[list[list[int]], list[int], list[list[int]]]:
    """Unimodular U, V and the diagonal d of U a V."""
    k, n = len(a), len(a[0])
    dm = DomainMatrix([[ZZ(x) for x in row] for row in a], (k, n), ZZ)
    smf, u, v = smith_normal_decomp(dm)
    diagonal = smf.to_list()
    return _ints(u), [int(diagonal[i][i]) for i in range(min(k, n))], _ints(v)


def _ints(m: DomainMatrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.to_list()]


def _power(z: Scalar, e: int) -> Scalar:
    base = z if e >= 0 else inverse(z)
    acc = ONE
    for _ in range(abs(e)):
        acc = acc * base
    return acc


# ==================== Minor system ====================

@dataclass
class MinorSystem:
    family: LinearFamily
    shape: RealignmentShape
    torus: bool = False  # invertibility holds exactly when every parameter is nonzero
    polynomials: list[PolyElement] = field(default_factory=list)

    def __post_init__(self):
        self.ring, *self.gens = ring(list(self.family.names), QQ_I)
        realigned = [realign(g, self.shape) for g in self.family.generators]
        rows, cols = self.shape.realigned_shape
        entries = [[self._linear_form(realigned, i, j) for j in range(cols)] for i in range(rows)]
        live_rows = [i for i in range(rows) if any(entries[i][j] for j in range(cols))]
        live_cols = [j for j in range(cols) if any(entries[i][j] for i in range(rows))]
        seen = set()
        for x, i in enumerate(live_rows):
            for i2 in live_rows[x + 1:]:
                for y, j in enumerate(live_cols):
                    for j2 in live_cols[y + 1:]:
                        minor = entries[i][j] * entries[i2][j2] - entries[i][j2] * entries[i2][j]
                        if minor and minor not in seen:
                            seen.add(minor)
                            self.polynomials.append(minor)
        logger.debug(f"Minor system: {len(self.gens)} parameters, {len(self.polynomials)} quadrics")

    def _linear_form(self, realigned: Sequence[ExactMatrix], i: int, j: int) -> PolyElement:
        form = self.ring.zero
        for gen, r in zip(self.gens, realigned):
            c = r[i, j]
            if c:
                form += gen * c
        return form

    @property
    def side_conditions(self) -> list[PolyElement]:
        if not self.torus:
            return []
        product = self.ring.one
        for gen in self.gens:
            product *= gen
        return [product]

    def evaluate(self, poly: PolyElement, values: Sequence[Scalar]) -> Scalar:
        total = ZERO
        for monom, coeff in poly.terms():
            term = coeff
            for v, e in zip(values, monom):
                if e:
                    term = term * _power(v, e)
            total += term
        return total

    def is_solution(self, values: Sequence[Scalar]) -> bool:
        return all(not self.evaluate(p, values) for p in self.polynomials)

    def _reduced(self) -> list[PolyElement]:
        """Echelon basis of the quadric span in monomial coordinates."""
        monomials = sorted({m for p in self.polynomials for m in p.monoms()}, reverse=True)
        index = {m: k for k, m in enumerate(monomials)}
        matrix_rows = []
        for p in self.polynomials:
            row = [ZERO] * len(monomials)
            for m, c in p.terms():
                row[index[m]] = c
            matrix_rows.append(row)
        reduced, pivots = rref(ExactMatrix.from_rows(matrix_rows))
        basis = []
        for r in range(len(pivots)):
            basis.append(self.ring.from_dict({monomials[k]: reduced[r, k] for k in range(len(monomials))
                                              if reduced[r, k]}))
        return basis

    def analyze(self) -> MinorResult:
        if not self.polynomials:
            return MinorResult(MinorOutcome.UNDECIDED, "trivial", detail="every member realigns to rank at most one")
        if self.torus:
            candidates = self.polynomials
            if any(len(p.terms()) > 2 for p in candidates):
                candidates = self._reduced()
            if all(len(p.terms()) <= 2 for p in candidates):
                return self._solve_binomial(candidates)
        return self._linearize()

    # ==================== Binomial systems ====================

    def _solve_binomial(self, rows: Sequence[PolyElement]) -> MinorResult:
        exponents: list[list[int]] = []
        ratios: list[Scalar] = []
        for p in rows:
            terms = p.terms()
            if len(terms) == 1:
                return MinorResult(
                    MinorOutcome.INFEASIBLE, "binomial",
                    certificate=f"minor {p.as_expr()} vanishes only where a parameter is zero",
                )
            (m1, c1), (m2, c2) = terms
            exponents.append([a - b for a, b in zip(m1, m2)])
            ratios.append(-div(c2, c1))

        n = len(self.gens)
        u, diagonal, v = smith_form(exponents)
        reduced_ratios = []
        for row in u:
            value = ONE
            for weight, ratio in zip(row, ratios):
                if weight:
                    value = value * _power(ratio, weight)
            reduced_ratios.append(value)

        for l, value in enumerate(reduced_ratios):
            d = diagonal[l] if l < len(diagonal) else 0
            if d == 0 and value != ONE:
                return MinorResult(
                    MinorOutcome.INFEASIBLE, "binomial",
                    certificate=(f"integer combination {u[l]} of the binomial minors forces "
                                 f"1 = {format_scalar(value)}"),
                )

        s = [ONE] * n
        for l, d in enumerate(diagonal):
            if d == 0:
                continue
            target = reduced_ratios[l] if d > 0 else inverse(reduced_ratios[l])
            d = abs(d)
            roots = rational_roots(ExactPoly([-target] + [ZERO] * (d - 1) + [ONE]))
            if not roots:
                return MinorResult(
                    MinorOutcome.UNDECIDED, "binomial",
                    detail=f"solvable over C but x^{d} = {format_scalar(target)} has no root in Q(i)",
                )
            s[l] = roots[0]

        values = []
        for i in range(n):
            value = ONE
            for k in range(n):
                if v[i][k]:
                    value = value * _power(s[k], v[i][k])
            values.append(value)
        if not all(not self.evaluate(p, values) for p in rows):
            return MinorResult(MinorOutcome.UNDECIDED, "binomial", detail="binomial solution failed re-evaluation")
        return MinorResult.solved("binomial", [values], exhaustive=False)

    # ==================== Linearization ====================

    def _linearize(self) -> MinorResult:
        """Every solution t gives a Gram matrix t t^T in the kernel of the linearized quadrics.

        SOLVED results list every rank-one line found; `exhaustive` marks
        that no other line can solve the system.
        """
        n = len(self.gens)
        pairs = [(a, b) for a in range(n) for b in range(a, n)]
        column = {}
        for k, (a, b) in enumerate(pairs):
            monom = [0] * n
            monom[a] += 1
            monom[b] += 1
            column[tuple(monom)] = k
        matrix_rows = []
        for p in self.polynomials:
            row = [ZERO] * len(pairs)
            for m, c in p.terms():
                row[column[m]] = c
            matrix_rows.append(row)
        kernel = nullspace_rows(ExactMatrix.from_rows(matrix_rows, cols=len(pairs)))

        if not kernel:
            return MinorResult(MinorOutcome.INFEASIBLE, "linearization",
                               certificate="linearized minors admit only the zero parameter point")
        grams = [self._gram(w, pairs, n) for w in kernel]
        if len(grams) == 1:
            gram = grams[0]
            if rank(gram) != 1:
                return MinorResult(MinorOutcome.INFEASIBLE, "linearization",
                                   certificate=f"the only quadric solution has rank {rank(gram)}, not t t^T")
            return MinorResult.solved("linearization", [_rank_one_vector(gram)], exhaustive=True)
        if len(grams) == 2 and n <= _PENCIL_LIMIT:
            return self._rank_one_in_pencil(*grams)
        return MinorResult(MinorOutcome.UNDECIDED, "linearization",
                           detail=f"linearized solution space has dimension {len(kernel)}")

    @staticmethod
    def _gram(w: Sequence[Scalar], pairs: Sequence[tuple[int, int]], n: int) -> ExactMatrix:
        entries = [[ZERO] * n for _ in range(n)]
        for k, (a, b) in enumerate(pairs):
            entries[a][b] = entries[b][a] = w[k]
        return ExactMatrix.from_rows(entries)

    def _rank_one_in_pencil(self, first: ExactMatrix, second: ExactMatrix) -> MinorResult:
        """Rank-one members of span{first, second}: first itself and second + a*first.

        The admissible a are the common roots of the 2x2 minors of
        second + a*first, each of degree at most two in a.
        """
        n = first.rows
        points = [gq(k) for k in range(3)]
        samples = [second + first.scale(a) for a in points]
        polys = []
        for i in range(n):
            for i2 in range(i + 1, n):
                for j in range(n):
                    for j2 in range(j + 1, n):
                        values = [s[i, j] * s[i2, j2] - s[i, j2] * s[i2, j] for s in samples]
                        poly = interpolate(points, values)
                        if not poly.is_zero():
                            polys.append(poly)

        members = [first] if rank(first) == 1 else []
        if not polys:
            # a whole line of rank-one Gram matrices leaves a free parameter
            members.append(second)
            return MinorResult.solved("linearization", [_rank_one_vector(m) for m in members],
                                      exhaustive=False)
        common = poly_gcd(polys)
        exhaustive = True
        if common.degree > 0:
            try:
                roots = [root for root, _ in factor_linear(common)]
            except IrreducibleFactor:
                roots, exhaustive = rational_roots(common), False
            members.extend(second + first.scale(a) for a in roots)
        members = [m for m in members if rank(m) == 1]
        if not members:
            if not exhaustive:
                return MinorResult(MinorOutcome.UNDECIDED, "linearization",
                                   detail="rank-one quadric needs an algebraic extension of Q(i)")
            return MinorResult(MinorOutcome.INFEASIBLE, "linearization",
                               certificate="no member of the two-dimensional quadric solution space has rank one")
        return MinorResult.solved("linearization", [_rank_one_vector(m) for m in members], exhaustive=exhaustive)


def _rank_one_vector(gram: ExactMatrix) -> list[Scalar]:
    j = next(j for j in range(gram.rows) if gram[j, j])
    return gram.column_values(j)
