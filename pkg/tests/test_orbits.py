"""Randomized SLOCC orbits: signatures, standard forms and equivalence witnesses.

SLOCC_ORBIT_STATES sets the number of states per shape; the default keeps
the suite short, 34 covers two hundred pairs over the six shapes.
"""

import os
import random

import pytest

from slocc.core.canonical import signature_of, standard_form
from slocc.core.decide import DecisionBudget, VerdictKind, decide_equivalence, verify_witness
from slocc.core.state import LocalOperatorQuad, StateShape, StateTensor, apply_slocc, arrange_axes, random_state
from slocc.errors import IrreducibleFactor

pytestmark = pytest.mark.slow

# Generic states of these shapes have purely singular pencils
SINGULAR_SHAPES = [
    StateShape.of(2, 4, 3, 2),
    StateShape.of(2, 4, 4, 2),
    StateShape.of(2, 4, 3, 3),
    StateShape.of(2, 4, 4, 3),
    StateShape.of(2, 4, 4, 4),
]
STATES_PER_SHAPE = int(os.environ.get("SLOCC_ORBIT_STATES", "2"))


def orbit_budget(seed: int) -> DecisionBudget:
    return DecisionBudget(samples=8, timeout_ms=20_000, mobius_samples=2, seed=seed)


def rational_spectrum_state(rng: random.Random) -> StateTensor:
    """Scrambled 2x2x2x4 state whose pencil has four distinct rational eigenvalues."""
    eigenvalues = rng.sample(range(-5, 6), 4)
    amplitudes = {}
    for k, value in enumerate(eigenvalues):
        amplitudes[(1, k // 2 + 1, k % 2 + 1, k + 1)] = 1
        amplitudes[(2, k // 2 + 1, k % 2 + 1, k + 1)] = value
    base = StateTensor.create(StateShape.of(2, 2, 2, 4), amplitudes)
    return apply_slocc(base, LocalOperatorQuad.random(base.shape, rng, bound=1))


def orbit_pairs(shape: StateShape):
    """(psi, scrambled, seed) for generic states of a singular shape."""
    for seed in range(STATES_PER_SHAPE):
        rng = random.Random(seed)
        psi = random_state(shape, 2, seed)
        if not psi.is_valid:
            continue
        yield psi, apply_slocc(psi, LocalOperatorQuad.random(shape, rng)), seed


def _assert_invariant_and_idempotent(psi, scrambled, context):
    a, b = arrange_axes(psi, None, None), arrange_axes(scrambled, None, None)
    assert signature_of(a) == signature_of(b), context
    form, route = standard_form(b)
    assert route.apply(b.pair().matrices) == form.matrices, context
    again, _ = standard_form(b.pair().with_matrices(*form.matrices))
    assert again == form, context


def _assert_equivalent(psi, scrambled, seed, context):
    verdict = decide_equivalence(psi, scrambled, orbit_budget(seed))
    assert verdict.kind == VerdictKind.EQUIVALENT, f"{context}: {verdict.diagnostics}"
    assert verify_witness(psi, scrambled, verdict.witness), context


@pytest.mark.parametrize("shape", SINGULAR_SHAPES, ids=str)
def test_singular_orbits_are_decided_equivalent(shape):
    decided = 0
    for psi, scrambled, seed in orbit_pairs(shape):
        context = f"{shape} seed {seed}"
        try:
            _assert_invariant_and_idempotent(psi, scrambled, context)
        except IrreducibleFactor:
            # non-generic draw with eigenvalues outside Q(i)
            continue
        _assert_equivalent(psi, scrambled, seed, context)
        decided += 1
    assert decided or not STATES_PER_SHAPE


def test_rational_spectrum_orbits_are_decided_equivalent():
    for seed in range(STATES_PER_SHAPE):
        rng = random.Random(1000 + seed)
        psi = rational_spectrum_state(rng)
        scrambled = apply_slocc(psi, LocalOperatorQuad.random(psi.shape, rng))
        _assert_invariant_and_idempotent(psi, scrambled, f"seed {seed}")
        _assert_equivalent(psi, scrambled, seed, f"2x2x2x4 seed {seed}")
