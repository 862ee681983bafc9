from fractions import Fraction
from itertools import combinations
import random

import pytest

from slocc.core.canonical import RouteTriple, signature_of
from slocc.core.decide import (
    DecisionBudget,
    InequivalenceReason,
    Verdict,
    VerdictKind,
    _Search,
    decide_equivalence,
    route,
    same_family,
    verify_witness,
)
from slocc.core.exact import ExactMatrix, div, gq
from slocc.core.minors import LinearFamily
from slocc.core.realign import RealignmentShape
from slocc.core.state import CompositeSide, LocalOperatorQuad, StateShape, StateTensor, apply_slocc, arrange_axes
from slocc.errors import DimensionMismatch, ShapeMismatch
from slocc.fixtures import CATALOG, psi_lambda, psi_lambda_tripartite, symmetry_f, symmetry_g, worked_state

FAMILY_2222 = [entry for entry in CATALOG if entry.shape == (2, 2, 2, 2)]


def rational_spectrum_state(eigenvalues) -> StateTensor:
    """2x2x2x4 state whose pencil is (E, diag(eigenvalues))."""
    amplitudes = {}
    for k, value in enumerate(eigenvalues):
        amplitudes[(1, k // 2 + 1, k % 2 + 1, k + 1)] = 1
        amplitudes[(2, k // 2 + 1, k % 2 + 1, k + 1)] = value
    return StateTensor.create(StateShape.of(2, 2, 2, 4), amplitudes)


def test_verdict_exit_codes():
    assert Verdict(VerdictKind.EQUIVALENT).exit_code == 0
    assert Verdict(VerdictKind.INEQUIVALENT).exit_code == 10
    assert Verdict(VerdictKind.UNDECIDED).exit_code == 3
    assert not Verdict(VerdictKind.UNDECIDED).is_definitive


def test_budget_rejects_nonpositive_timeout():
    with pytest.raises(ValueError):
        DecisionBudget(timeout_ms=0)


def test_identical_states_are_equivalent():
    psi = psi_lambda(2)
    verdict = decide_equivalence(psi, psi)
    assert verdict.kind == VerdictKind.EQUIVALENT
    assert verify_witness(psi, psi, verdict.witness)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        decide_equivalence(psi_lambda(2), worked_state())
    with pytest.raises(DimensionMismatch):
        verify_witness(psi_lambda(2), worked_state(), LocalOperatorQuad.identity(StateShape.of(2, 2, 2, 4)))


def test_2222_representatives_are_pairwise_separated():
    states = [entry.state() for entry in FAMILY_2222]
    assert len(states) == 5
    signatures = {signature_of(arrange_axes(s, None, None)).serialize() for s in states}
    assert len(signatures) == 5
    for first, second in combinations(states, 2):
        verdict = decide_equivalence(first, second)
        assert verdict.kind == VerdictKind.INEQUIVALENT
        assert verdict.reason == InequivalenceReason.SIGNATURE_MISMATCH


def test_psi_two_and_minus_one_are_inequivalent():
    first, second = psi_lambda(2), psi_lambda(-1)
    assert same_family(first, second)
    verdict = decide_equivalence(first, second)
    assert verdict.kind == VerdictKind.INEQUIVALENT
    assert verdict.reason in (InequivalenceReason.MINOR_INFEASIBLE, InequivalenceReason.ORBIT_EXHAUSTED)
    assert verdict.witness is None


def test_tripartite_psi_two_and_half_are_equivalent():
    first, second = psi_lambda_tripartite(2), psi_lambda_tripartite(Fraction(1, 2))
    found = route(first, second)
    assert found is not None
    a, b = arrange_axes(first, None, None), arrange_axes(second, None, None)
    assert found.apply(a.pair().matrices) == b.pair().matrices

    verdict = decide_equivalence(first, second)
    assert verdict.kind == VerdictKind.EQUIVALENT
    assert verify_witness(first, second, verdict.witness)


@pytest.mark.parametrize("lam, target, symmetry", [
    (2, Fraction(1, 2), symmetry_f(2)),
    (2, -1, symmetry_g()),
    (Fraction(1, 2), Fraction(1, 2), symmetry_g()),
])
def test_symmetries_are_tripartite_witnesses(lam, target, symmetry):
    first, second = psi_lambda_tripartite(lam), psi_lambda_tripartite(target)
    t, p, q = symmetry
    assert verify_witness(first, second, LocalOperatorQuad(t, p, q.T, ExactMatrix.identity(1)))

    verdict = decide_equivalence(first, second)
    assert verdict.kind == VerdictKind.EQUIVALENT
    assert verify_witness(first, second, verdict.witness)


def test_route_is_none_across_families():
    assert route(psi_lambda_tripartite(2), psi_lambda_tripartite(3)) is None


def test_scrambled_rational_spectrum_state_is_equivalent():
    rng = random.Random(7)
    psi = rational_spectrum_state([0, 1, 3, -2])
    scrambled = apply_slocc(psi, LocalOperatorQuad.random(psi.shape, rng))
    verdict = decide_equivalence(psi, scrambled)
    assert verdict.kind == VerdictKind.EQUIVALENT
    assert verify_witness(psi, scrambled, verdict.witness)
    assert verdict.diagnostics["method"] == "stabilizer"


def test_continuous_family_never_reports_false_inequivalence():
    rng = random.Random(11)
    psi = worked_state()
    quad = LocalOperatorQuad.random(psi.shape, rng)
    scrambled = apply_slocc(psi, quad)
    verdict = decide_equivalence(psi, scrambled, DecisionBudget(samples=8, mobius_samples=2),
                                 qubit_axis=1, single_axis=2)
    assert verdict.kind in (VerdictKind.EQUIVALENT, VerdictKind.UNDECIDED)
    if verdict.kind == VerdictKind.EQUIVALENT:
        assert verify_witness(psi, scrambled, verdict.witness)
    else:
        assert verdict.diagnostics["continuous_mobius"]


def _realigned_operator(entries):
    """4x4 operator on C^2 (x) C^2 whose realignment carries {(row, col): value}."""
    rows = [[0] * 4 for _ in range(4)]
    for (i, j), value in entries.items():
        block_col, block_row = divmod(i, 2)
        col, row = divmod(j, 2)
        rows[block_row * 2 + row][block_col * 2 + col] = value
    return ExactMatrix.from_rows(rows)


class _TwoLineCandidate:
    """Two parameters whose composite realigns to rank one on t0 = 2 t1 and t0 = 3 t1.

    Only members of the lines named in `invertible` instantiate to a route.
    """

    monomial_pattern = False
    parameter_count = 2

    def __init__(self, invertible=()):
        self.invertible = invertible
        self.family = LinearFamily(("t0", "t1"), (
            _realigned_operator({(0, 0): 1, (1, 1): 1}),
            _realigned_operator({(0, 1): 1, (1, 0): -6, (1, 1): -5}),
        ))

    def instantiate(self, values):
        t0, t1 = (gq(v) for v in values)
        if not t1 or div(t0, t1) not in [gq(k) for k in self.invertible]:
            return None
        return RouteTriple(ExactMatrix.identity(2), ExactMatrix.identity(4), ExactMatrix.identity(4),
                           CompositeSide.ROWS)


def _search():
    psi = psi_lambda(2)
    a = arrange_axes(psi, None, None)
    search = _Search(a, a, DecisionBudget(samples=0))
    search.shape = RealignmentShape.square(2, 2)
    return search


def test_explore_tries_every_rank_one_line():
    outcome = _search().explore(_TwoLineCandidate(invertible=(3,)))
    assert outcome.witness is not None
    outcome = _search().explore(_TwoLineCandidate(invertible=(2,)))
    assert outcome.witness is not None


def test_explore_certifies_only_when_every_line_is_singular():
    outcome = _search().explore(_TwoLineCandidate())
    assert outcome.certified
    assert "2 rank-one line(s)" in outcome.certificate
