from fractions import Fraction
import random

from slocc.core.canonical import signature_of, stabilizer, standard_form
from slocc.core.decide import same_family
from slocc.core.exact import gq, rank, random_gaussian_integer
from slocc.core.state import CompositeSide, MatrixPair, apply_route, from_matrix_pair, to_matrix_pair
from slocc.fixtures import (
    B_MATRIX,
    LAMBDA,
    WORKED_GAMMA1,
    WORKED_GAMMA2,
    WORKED_P0,
    WORKED_Q0,
    commutant_stabilizer,
    unipotent_stabilizer,
    worked_state,
)

POINTS = 24


def lambda_b_state():
    return from_matrix_pair(MatrixPair(LAMBDA, B_MATRIX, CompositeSide.COLUMNS, (3, 2), 4))


def test_ket_reproduces_printed_pair():
    pair = to_matrix_pair(worked_state())
    assert pair.gamma1 == WORKED_GAMMA1
    assert pair.gamma2 == WORKED_GAMMA2
    assert rank(pair.gamma1) == 4


def test_printed_witnesses_reach_lambda_b():
    assert WORKED_P0 @ WORKED_GAMMA1 @ WORKED_Q0 == LAMBDA
    assert WORKED_P0 @ WORKED_GAMMA2 @ WORKED_Q0 == B_MATRIX


def test_worked_state_shares_family_with_lambda_b():
    assert same_family(worked_state(), lambda_b_state())
    assert signature_of(worked_state()) == signature_of(lambda_b_state())


def test_unipotent_family_fixes_lambda_b():
    for k in range(POINTS):
        alpha = gq(Fraction(k - 12, 5), k % 3)
        s1, s2, s3 = unipotent_stabilizer(alpha)
        assert apply_route((LAMBDA, B_MATRIX), s1, s2, s3) == (LAMBDA, B_MATRIX), f"alpha={alpha}"


def test_commutant_family_fixes_lambda_b():
    rng = random.Random(31)
    names = ("a11", "a21", "a22", "a31", "a32", "a33", "a34")
    for k in range(POINTS):
        values = {name: random_gaussian_integer(rng, 4) for name in names}
        for name in ("a11", "a22", "a33"):
            if not values[name]:
                values[name] = gq(1 + k)
        s, s_prime = commutant_stabilizer(values)
        assert s @ LAMBDA @ s_prime == LAMBDA, f"point {k}"
        assert s @ B_MATRIX @ s_prime == B_MATRIX, f"point {k}"


def test_computed_stabilizer_fixes_the_standard_form():
    form, route = standard_form(worked_state())
    assert route.apply(to_matrix_pair(worked_state()).matrices) == form.matrices
    description = stabilizer(form)
    rng = random.Random(5)
    for k in range(POINTS):
        sample = description.elements[0].sample(rng)
        assert sample is not None, f"point {k}"
        s1, s2, s3 = sample
        assert apply_route(form.matrices, s1, s2, s3) == form.matrices
