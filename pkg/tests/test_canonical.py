from fractions import Fraction

import pytest

from slocc.core.canonical import (
    MobiusMap,
    RouteTriple,
    anchor_map,
    mobius_normalize,
    residual_orbit,
    signature_of,
    stabilizer,
    standard_form,
)
from slocc.core.exact import ExactMatrix, gq, inverse
from slocc.core.pencil import PencilBlock, pencil_blocks
from slocc.core.state import StateShape, LocalOperatorQuad, apply_route, apply_slocc, arrange_axes, random_state
from slocc.errors import DegenerateLambda
from slocc.fixtures import (
    psi_lambda,
    psi_lambda_pair,
    psi_lambda_tripartite,
    symmetry_f,
    symmetry_g,
    three_lambda_cross_ratio,
    three_lambda_reduction,
    three_lambda_state,
    worked_state,
)


def test_anchor_map_sends_points_to_infinity_zero_one():
    mobius = anchor_map([gq(2), gq(3), gq(5)])
    assert mobius.apply(gq(2)) is None
    assert mobius.apply(gq(3)) == gq(0)
    assert mobius.apply(gq(5)) == gq(1)

    single = anchor_map([gq(0)])
    assert single.apply(gq(0)) is None
    pair = anchor_map([None, gq(4)])
    assert pair.apply(None) is None
    assert pair.apply(gq(4)) == gq(0)


def test_mobius_compose_applies_right_map_first():
    f = MobiusMap(gq(1), gq(2), gq(0), gq(1))
    g = MobiusMap(gq(0), gq(1), gq(1), gq(3))
    for point in (None, gq(0), gq(1), gq(-2), gq(0, 1)):
        assert f.compose(g).apply(point) == f.apply(g.apply(point))


def test_residual_orbit():
    assert residual_orbit(gq(2)) == [gq(-1), gq(Fraction(1, 2)), gq(2)]
    assert len(residual_orbit(gq(3))) == 6
    for value in (0, 1):
        with pytest.raises(DegenerateLambda):
            residual_orbit(gq(value))


def test_psi_lambda_signatures_follow_the_orbit():
    signatures = {lam: signature_of(psi_lambda_tripartite(lam)) for lam in (2, Fraction(1, 2), -1, 3)}
    assert signatures[2] == signatures[Fraction(1, 2)] == signatures[-1]
    assert signatures[2] != signatures[3]
    assert signatures[2].invariants == (gq(-1),)


def test_arranged_psi_lambda_shares_the_signature():
    arranged = arrange_axes(psi_lambda(2), None, None)
    assert signature_of(arranged) == signature_of(psi_lambda_tripartite(2))


def test_three_lambda_invariant():
    sig = signature_of(three_lambda_state(3, 2, 4))
    assert sig.invariants == (gq(-2),)
    assert sig.family_parameters == (gq(Fraction(-1, 2)),)
    assert three_lambda_cross_ratio(3, 2, 4) == gq(Fraction(-1, 2))


def test_three_lambda_reduction_reaches_psi_lambda():
    for l1, l2, l3 in ((3, 2, 4), (5, -1, 2), (2, 7, -3)):
        t, p, q = three_lambda_reduction(l1, l2, l3)
        pair = (ExactMatrix.identity(4), ExactMatrix.diag([l1, l2, l3, 0]))
        assert apply_route(pair, t, p, q) == psi_lambda_pair(three_lambda_cross_ratio(l1, l2, l3))


def test_standard_form_route_and_idempotence():
    for seed in range(4):
        psi = random_state(StateShape.of(2, 3, 2, 2), 2, seed=seed)
        arranged = arrange_axes(psi, 1, 2)
        form, route = standard_form(arranged)
        assert route.apply(arranged.pair().matrices) == form.matrices
        again, identity = standard_form(arranged.pair().with_matrices(*form.matrices))
        assert again == form
        assert identity == RouteTriple.identity(arranged.pair())


def test_signature_is_slocc_invariant(rng):
    psi = worked_state()
    quad = LocalOperatorQuad.random(psi.shape, rng)
    assert signature_of(apply_slocc(psi, quad)) == signature_of(psi)


def test_mobius_normalize_moves_three_points():
    blocks = [PencilBlock.finite(v, 1) for v in (2, 3, 5, 7)]
    normalized, mobius, t = mobius_normalize(blocks)
    points = {b.eigenvalue for b in normalized}
    assert None in points and gq(0) in points and gq(1) in points
    assert t == mobius.matrix


def test_stabilizer_of_harmonic_family_is_finite(rng):
    form, _ = standard_form(psi_lambda_tripartite(2))
    description = stabilizer(form)
    assert not description.continuous_mobius
    assert len(description.elements) == 8
    for element in description.elements:
        s1, s2, s3 = element.sample(rng)
        assert apply_route(form.matrices, s1, s2, s3) == form.matrices


def test_stabilizer_of_worked_form_is_continuous(rng):
    form, _ = standard_form(arrange_axes(worked_state(), 1, 2))
    description = stabilizer(form)
    assert description.continuous_mobius
    assert description.commutant_generators
    s1, s2, s3 = description.elements[0].sample(rng)
    assert apply_route(form.matrices, s1, s2, s3) == form.matrices
    assert pencil_blocks(*form.matrices) == list(form.blocks)


@pytest.mark.parametrize("lam", [2, 3, Fraction(1, 3), gq(1, 1)])
def test_symmetries_move_psi_lambda_along_the_orbit(lam):
    pair = psi_lambda_pair(lam)
    assert apply_route(pair, *symmetry_g()) == psi_lambda_pair(1 - gq(lam))
    assert apply_route(pair, *symmetry_f(lam)) == psi_lambda_pair(inverse(gq(lam)))


@pytest.mark.parametrize("lam, symmetry", [(-1, symmetry_f(-1)), (Fraction(1, 2), symmetry_g())])
def test_stabilizer_of_psi_lambda_contains_the_symmetries(lam, symmetry):
    t, p, q = symmetry
    assert apply_route(psi_lambda_pair(lam), t, p, q) == psi_lambda_pair(lam)

    form, to_form = standard_form(psi_lambda_tripartite(lam))
    fixing = to_form.inverse().then(RouteTriple(t, p, q, to_form.composite_side)).then(to_form)
    assert fixing.apply(form.matrices) == form.matrices

    description = stabilizer(form)
    element = description.compensate(fixing.t)
    assert element is not None
    assert element.mobius.normalized() in [e.mobius.normalized() for e in description.elements]
