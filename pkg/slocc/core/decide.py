"""SLOCC equivalence decisions through a shared standard form.

Both states are routed to their common standard form; every stabilizer
element of that form yields a linear family of candidate routes, and the
states are equivalent iff some invertible member has a Kronecker-product
operator on the composite side.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
import random
import time
from typing import Any, Optional

from slocc.core.canonical import (
    RouteTriple,
    StabilizerDescription,
    StabilizerElement,
    signature_of,
    stabilizer,
    standard_form,
)
from slocc.core.exact import ONE, ZERO, ExactMatrix, gq, invert, is_invertible, random_gaussian_integer
from slocc.core.lift import LiftOptions, lift_witness
from slocc.core.minors import LinearFamily, MinorOutcome, MinorResult, MinorSystem
from slocc.core.realign import RealignmentShape, is_kronecker, rank_one_factor
from slocc.core.state import (
    ArrangedState,
    CompositeSide,
    LocalOperatorQuad,
    StateTensor,
    apply_slocc,
    arrange_axes,
)
from slocc.errors import DimensionMismatch, ShapeMismatch, WitnessVerificationError

logger = logging.getLogger(__name__)


class VerdictKind(str, Enum):
    EQUIVALENT = "Equivalent"
    INEQUIVALENT = "Inequivalent"
    UNDECIDED = "SameFamilyUndecided"


class InequivalenceReason(str, Enum):
    SIGNATURE_MISMATCH = "SignatureMismatch"
    ORBIT_EXHAUSTED = "OrbitExhausted"
    MINOR_INFEASIBLE = "MinorInfeasible"


_EXIT_CODES = {VerdictKind.EQUIVALENT: 0, VerdictKind.INEQUIVALENT: 10, VerdictKind.UNDECIDED: 3}


@dataclass
class Verdict:
    kind: VerdictKind
    witness: Optional[LocalOperatorQuad] = None
    reason: Optional[InequivalenceReason] = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self.kind]

    @property
    def is_definitive(self) -> bool:
        return self.kind != VerdictKind.UNDECIDED


@dataclass(frozen=True)
class DecisionBudget:
    samples: int = 64
    timeout_ms: int = 60000
    max_minor_parameters: int = 40
    mobius_samples: int = 8
    witness_attempts: int = 24
    lift_restarts: int = 6
    seed: int = 20240101

    def __post_init__(self):
        if self.samples < 0 or self.timeout_ms <= 0 or self.mobius_samples < 0 or self.lift_restarts < 0:
            raise ValueError("decision budgets must be positive")


def verify_witness(psi: StateTensor, psi2: StateTensor, w: LocalOperatorQuad) -> bool:
    if psi.shape != psi2.shape:
        raise DimensionMismatch(f"states have shapes {psi.shape} and {psi2.shape}")
    return apply_slocc(psi, w) == psi2


def _arrange_pair(psi, psi2, qubit_axis, single_axis) -> tuple[ArrangedState, ArrangedState]:
    if psi.shape != psi2.shape:
        raise ShapeMismatch(f"cannot compare a {psi.shape} state with a {psi2.shape} state")
    a = arrange_axes(psi.require_valid(), qubit_axis, single_axis)
    b = arrange_axes(psi2.require_valid(), qubit_axis, single_axis)
    return a, b


def route(psi: StateTensor, psi2: StateTensor, qubit_axis: Optional[int] = None,
          single_axis: Optional[int] = None) -> Optional[RouteTriple]:
    """Concrete (T, P, Q) between the pairs of two same-family states, or None."""
    a, b = _arrange_pair(psi, psi2, qubit_axis, single_axis)
    if signature_of(a) != signature_of(b):
        return None
    _, forward = standard_form(a)
    _, backward = standard_form(b)
    composed = forward.then(backward.inverse())
    if composed.apply(a.pair().matrices) != b.pair().matrices:
        raise WitnessVerificationError("composed route failed exact verification")
    return composed


# ==================== Candidate families ====================

class CandidateFamily:
    """Routes T0'^-1 S1 T0, P0'^-1 X P0, Q0 Y^-1 Q0'^-1 for one stabilizer element.

    The composite-side operator (P on rows layouts, Q^-1 on column layouts)
    is linear in the parameters of X and the free rows of Y.
    """

    def __init__(self, element: StabilizerElement, start: RouteTriple, end: RouteTriple):
        self.element = element
        self.start = start
        self.end_inverse = end.inverse()
        self.side = start.composite_side
        system = element.system
        self.t = self.end_inverse.t @ element.s1 @ start.t

        names = [f"x{k + 1}" for k in range(len(system.x_basis))]
        generators = []
        if self.side == CompositeSide.ROWS:
            for basis in system.x_basis:
                generators.append(self.end_inverse.p @ basis @ start.p)
        else:
            end_q_inverse = invert(self.end_inverse.q)
            start_q_inverse = invert(start.q)
            for basis in system.x_basis:
                y = system.assemble_y(system.y_determined(basis))
                generators.append(end_q_inverse @ y @ start_q_inverse)
            for k, row in enumerate(system.free_rows):
                for c in range(system.cols):
                    unit = ExactMatrix(1, system.cols, (ONE if j == c else ZERO for j in range(system.cols)))
                    free = ExactMatrix.zeros(len(system.free_rows), system.cols)
                    free = _replace_row(free, k, unit)
                    y = system.assemble_y(ExactMatrix.zeros(len(system.nonzero_cols), system.cols), free)
                    generators.append(end_q_inverse @ y @ start_q_inverse)
                    names.append(f"y{row + 1}_{c + 1}")
        self.family = LinearFamily(tuple(names), tuple(generators))

    @property
    def parameter_count(self) -> int:
        return len(self.family.names)

    @property
    def monomial_pattern(self) -> bool:
        """X(t) is a scaled permutation matrix with one parameter per entry.

        Invertibility is then equivalent to every parameter being nonzero.
        """
        system = self.element.system
        basis = system.x_basis
        if self.side == CompositeSide.COLUMNS and system.free_rows:
            return False
        if len(basis) != system.rows:
            return False
        positions = []
        for b in basis:
            nonzero = [(i, j) for i in range(b.rows) for j in range(b.cols) if b[i, j]]
            if len(nonzero) != 1:
                return False
            positions.append(nonzero[0])
        rows = {i for i, _ in positions}
        cols = {j for _, j in positions}
        return len(rows) == len(cols) == len(basis)

    def instantiate(self, values) -> Optional[RouteTriple]:
        values = [gq(v) for v in values]
        system = self.element.system
        nx = len(system.x_basis)
        x = system.combination(values[:nx])
        if not is_invertible(x):
            return None
        determined = system.y_determined(x)
        if self.side == CompositeSide.ROWS:
            free = system.complete_free_rows(determined)
            if free is None:
                return None
        else:
            free = ExactMatrix(len(system.free_rows), system.cols, values[nx:]) if system.free_rows else None
        y = system.assemble_y(determined, free)
        if not is_invertible(y):
            return None
        return RouteTriple(
            self.t,
            self.end_inverse.p @ x @ self.start.p,
            self.start.q @ invert(y) @ self.end_inverse.q,
            self.side,
        )


def _replace_row(m: ExactMatrix, k: int, row: ExactMatrix) -> ExactMatrix:
    rows = m.to_rows()
    rows[k] = row.row(0)
    return ExactMatrix.from_rows(rows, cols=m.cols)


def _composite(route_: RouteTriple) -> ExactMatrix:
    """The operator that must factor as A3 (x) A4."""
    return route_.p if route_.composite_side == CompositeSide.ROWS else route_.q.T


def _quad_from_route(route_: RouteTriple, shape: RealignmentShape) -> Optional[LocalOperatorQuad]:
    factors = rank_one_factor(_composite(route_), shape)
    if factors is None:
        return None
    single = route_.q.T if route_.composite_side == CompositeSide.ROWS else route_.p
    return LocalOperatorQuad(route_.t, single, factors.left, factors.right)


# ==================== Decision ====================

@dataclass
class _ElementOutcome:
    witness: Optional[RouteTriple] = None
    certified: bool = False
    finite_only: bool = False
    detail: str = ""
    certificate: Optional[str] = None
    samples: int = 0


class _Search:
    def __init__(self, a: ArrangedState, b: ArrangedState, budget: DecisionBudget):
        self.a, self.b = a, b
        self.budget = budget
        self.rng = random.Random(budget.seed)
        self.deadline = time.monotonic() + budget.timeout_ms / 1000
        m, n = a.shape[2], a.shape[3]
        self.shape = RealignmentShape.square(m, n)

    @property
    def expired(self) -> bool:
        return time.monotonic() > self.deadline

    def accepts(self, candidate: Optional[RouteTriple]) -> bool:
        return candidate is not None and is_kronecker(_composite(candidate), self.shape)

    def explore(self, candidate: CandidateFamily) -> _ElementOutcome:
        if candidate.parameter_count == 0:
            return _ElementOutcome(certified=True, finite_only=True, detail="no compensating operators")

        if candidate.parameter_count == 1:
            found = candidate.instantiate([1])
            if self.accepts(found):
                return _ElementOutcome(witness=found)
            return _ElementOutcome(certified=True, finite_only=True, detail="unique compensation is not a product")

        # cheap seeds before any symbolic work
        n = candidate.parameter_count
        seeds = [[1] * n] + [[int(j == k) for j in range(n)] for k in range(n)]
        for values in seeds:
            found = candidate.instantiate(values)
            if self.accepts(found):
                return _ElementOutcome(witness=found)

        outcome = _ElementOutcome()
        if n <= self.budget.max_minor_parameters:
            system = MinorSystem(candidate.family, self.shape, torus=candidate.monomial_pattern)
            result: MinorResult = system.analyze()
            logger.debug(f"Minor analysis via {result.method}: {result.outcome.value}")
            if result.outcome == MinorOutcome.INFEASIBLE:
                return _ElementOutcome(certified=True, certificate=result.certificate, detail=result.method)
            if result.outcome == MinorOutcome.SOLVED:
                for values in result.candidates:
                    found = candidate.instantiate(values)
                    if self.accepts(found):
                        return _ElementOutcome(witness=found)
                if result.exhaustive:
                    return _ElementOutcome(
                        certified=True, detail=result.method,
                        certificate=f"all {len(result.candidates)} rank-one line(s) instantiate singular",
                    )
            outcome.detail = result.detail or result.method
        else:
            logger.warning(f"Skipping minor analysis: {n} parameters exceed the cap "
                           f"{self.budget.max_minor_parameters}")
            outcome.detail = "parameter cap"

        for _ in range(self.budget.samples):
            if self.expired:
                outcome.detail = "timeout"
                break
            outcome.samples += 1
            found = candidate.instantiate([random_gaussian_integer(self.rng, 3) for _ in range(n)])
            if self.accepts(found):
                return _ElementOutcome(witness=found, samples=outcome.samples)
        return outcome


def decide_equivalence(psi: StateTensor, psi2: StateTensor, budget: Optional[DecisionBudget] = None,
                       qubit_axis: Optional[int] = None, single_axis: Optional[int] = None) -> Verdict:
    """Decide SLOCC equivalence of two states, with a verified witness when equivalent."""
    budget = budget or DecisionBudget()
    a, b = _arrange_pair(psi, psi2, qubit_axis, single_axis)
    diagnostics: dict[str, Any] = {
        "shape": str(psi.shape),
        "qubit_axis": a.arrangement.qubit_axis,
        "single_axis": a.arrangement.single_axis,
        "composite_side": a.composite_side.value,
    }

    if a.tensor == b.tensor:
        return Verdict(VerdictKind.EQUIVALENT, witness=LocalOperatorQuad.identity(psi.shape),
                       diagnostics={**diagnostics, "method": "identical"})

    sig_a, sig_b = signature_of(a), signature_of(b)
    diagnostics["signatures"] = [sig_a.serialize(), sig_b.serialize()]
    if sig_a != sig_b:
        return Verdict(VerdictKind.INEQUIVALENT, reason=InequivalenceReason.SIGNATURE_MISMATCH,
                       diagnostics=diagnostics)

    form, start = standard_form(a, budget.witness_attempts)
    _, end = standard_form(b, budget.witness_attempts)
    description = stabilizer(form)
    elements = list(description.elements)
    if description.continuous_mobius:
        # continuous freedom is only sampled below, so the numeric lift goes first
        verdict = _lifted(psi, psi2, budget, diagnostics)
        if verdict is not None:
            return verdict
        elements += _sampled_elements(description, budget)

    search = _Search(a, b, budget)
    certified_all = not description.continuous_mobius
    finite_only = True
    certificates, details, samples = [], [], 0
    for element in elements:
        if search.expired:
            certified_all = False
            details.append("timeout")
            break
        outcome = search.explore(CandidateFamily(element, start, end))
        samples += outcome.samples
        if outcome.witness is not None:
            return _equivalent(psi, psi2, a, outcome.witness, search.shape, diagnostics)
        certified_all = certified_all and outcome.certified
        finite_only = finite_only and outcome.finite_only
        if outcome.certificate:
            certificates.append(outcome.certificate)
        if outcome.detail:
            details.append(outcome.detail)

    diagnostics.update({
        "stabilizer_elements": len(elements),
        "continuous_mobius": description.continuous_mobius,
        "sampled_parameters": samples,
        "seed": budget.seed,
    })
    if certified_all:
        reason = InequivalenceReason.ORBIT_EXHAUSTED if finite_only else InequivalenceReason.MINOR_INFEASIBLE
        diagnostics["certificates"] = certificates
        logger.info(f"Inequivalent ({reason.value}) after {len(elements)} stabilizer elements")
        return Verdict(VerdictKind.INEQUIVALENT, reason=reason, diagnostics=diagnostics)
    if not description.continuous_mobius:
        verdict = _lifted(psi, psi2, budget, diagnostics)
        if verdict is not None:
            return verdict
    diagnostics["unresolved"] = sorted(set(details))
    logger.info("Same family, equivalence undecided within budget")
    return Verdict(VerdictKind.UNDECIDED, diagnostics=diagnostics)


def _sampled_elements(description: StabilizerDescription, budget: DecisionBudget) -> list[StabilizerElement]:
    rng = random.Random(budget.seed ^ 0x4D0B)
    sampled = []
    for _ in range(budget.mobius_samples):
        element = description.compensate(description.sample_mobius(rng).matrix)
        if element is not None:
            sampled.append(element)
    return sampled


def _lifted(psi, psi2, budget: DecisionBudget, diagnostics: dict) -> Optional[Verdict]:
    if not budget.lift_restarts:
        return None
    witness = lift_witness(psi, psi2, LiftOptions(restarts=budget.lift_restarts, seed=budget.seed))
    if witness is None:
        return None
    if not verify_witness(psi, psi2, witness):
        raise WitnessVerificationError("lifted witness failed exact re-verification")
    logger.info("Equivalent: lifted witness verified by exact application")
    return Verdict(VerdictKind.EQUIVALENT, witness=witness, diagnostics={**diagnostics, "method": "numeric-lift"})


def _equivalent(psi, psi2, a: ArrangedState, found: RouteTriple, shape: RealignmentShape,
                diagnostics: dict) -> Verdict:
    quad = _quad_from_route(found, shape)
    if quad is None:
        raise WitnessVerificationError("accepted route does not factor on the composite side")
    witness = a.arrangement.to_original(quad)
    if not verify_witness(psi, psi2, witness):
        raise WitnessVerificationError("equivalence witness failed exact re-verification")
    logger.info("Equivalent: witness verified by exact application")
    return Verdict(VerdictKind.EQUIVALENT, witness=witness, diagnostics={**diagnostics, "method": "stabilizer"})


def same_family(psi: StateTensor, psi2: StateTensor, qubit_axis: Optional[int] = None,
                single_axis: Optional[int] = None) -> bool:
    a, b = _arrange_pair(psi, psi2, qubit_axis, single_axis)
    return signature_of(a) == signature_of(b)
