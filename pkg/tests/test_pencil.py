from fractions import Fraction

import pytest

from slocc.core.exact import ExactMatrix, determinant, gq, invert
from slocc.core.pencil import (
    BlockKind,
    PencilBlock,
    block_layout,
    canonical_pair,
    jordan_form,
    kcf,
    nonsingular_combination,
    pencil_blocks,
    solve_equivalence,
    sort_blocks,
)
from slocc.core.state import to_matrix_pair
from slocc.errors import ZeroPencil
from slocc.fixtures import B_MATRIX, LAMBDA, WORKED_GAMMA1, WORKED_GAMMA2, psi_lambda_pair, worked_state


def test_worked_pair_blocks():
    expected = [PencilBlock.right(1), PencilBlock.right(2), PencilBlock.finite(0, 1)]
    assert pencil_blocks(WORKED_GAMMA1, WORKED_GAMMA2) == expected
    assert pencil_blocks(LAMBDA, B_MATRIX) == expected


def test_psi_lambda_blocks():
    g1, g2 = psi_lambda_pair(2)
    blocks = pencil_blocks(g1, g2)
    assert blocks == [
        PencilBlock.infinite(1),
        PencilBlock.finite(0, 1),
        PencilBlock.finite(Fraction(1, 2), 1),
        PencilBlock.finite(1, 1),
    ]


def test_blocks_survive_random_equivalence(rng):
    blocks = sort_blocks([
        PencilBlock.left(1),
        PencilBlock.right(1),
        PencilBlock.finite(2, 2),
        PencilBlock.infinite(1),
    ])
    k1, k2 = block_layout(blocks)
    assert k1.shape == (6, 6)
    for seed in range(5):
        p = ExactMatrix.random_invertible(6, rng, bound=1)
        q = ExactMatrix.random_invertible(6, rng, bound=1)
        assert pencil_blocks(p @ k1 @ q, p @ k2 @ q) == blocks, f"blocks changed (seed {seed})"


def test_canonical_pair_witnesses(rng):
    p = ExactMatrix.random_invertible(4, rng)
    q = ExactMatrix.random_invertible(6, rng)
    g1, g2 = p @ LAMBDA @ q, p @ B_MATRIX @ q
    result = canonical_pair(g1, g2)
    assert result.p_witness @ g1 @ result.q_witness == result.canon1
    assert result.p_witness @ g2 @ result.q_witness == result.canon2
    assert (result.canon1, result.canon2) == block_layout(result.blocks)


def test_kcf_of_state_pair():
    result = kcf(to_matrix_pair(worked_state()))
    assert [b.kind for b in result.blocks] == [BlockKind.RIGHT, BlockKind.RIGHT, BlockKind.FINITE]


def test_solve_equivalence_rejects_distinct_eigenvalues():
    identity = ExactMatrix.identity(2)
    assert solve_equivalence((identity, ExactMatrix.diag([1, 2])), (identity, ExactMatrix.diag([1, 3]))) is None
    found = solve_equivalence((identity, ExactMatrix.diag([1, 2])), (identity, ExactMatrix.diag([2, 1])))
    assert found is not None
    x, q = found
    assert x @ ExactMatrix.diag([1, 2]) @ q == ExactMatrix.diag([2, 1])


def test_jordan_form_similarity(rng):
    j = ExactMatrix.from_rows([[3, 1, 0], [0, 3, 0], [0, 0, gq(0, 1)]])
    s = ExactMatrix.random_invertible(3, rng)
    m = s @ j @ invert(s)
    blocks, similarity = jordan_form(m)
    assert sorted((b.size, str(b.eigenvalue)) for b in blocks) == [(1, str(gq(0, 1))), (2, str(gq(3)))]
    _, target = block_layout([PencilBlock.finite(b.eigenvalue, b.size) for b in blocks])
    assert invert(similarity) @ m @ similarity == target


def test_zero_pencil():
    zero = ExactMatrix.zeros(2, 3)
    with pytest.raises(ZeroPencil):
        pencil_blocks(zero, zero)


def test_nonsingular_combination_skips_vanishing_values():
    basis = [ExactMatrix.identity(2), ExactMatrix.from_rows([[-1, 0], [0, 0]])]
    # the all-ones combination is singular
    assert determinant(basis[0] + basis[1]) == gq(0)
    assert nonsingular_combination(basis) == [gq(1), gq(0)]
    assert nonsingular_combination([ExactMatrix.from_rows([[1, 0], [0, 0]]), ExactMatrix.from_rows([[0, 1], [0, 0]])]) is None


def test_witnesses_without_random_trials(rng):
    p = ExactMatrix.random_invertible(4, rng)
    q = ExactMatrix.random_invertible(6, rng)
    g1, g2 = p @ LAMBDA @ q, p @ B_MATRIX @ q
    result = canonical_pair(g1, g2, attempts=0)
    assert result.p_witness @ g1 @ result.q_witness == result.canon1
    assert result.p_witness @ g2 @ result.q_witness == result.canon2

    j = ExactMatrix.from_rows([[2, 1, 0], [0, 2, 1], [0, 0, 2]])
    s = ExactMatrix.random_invertible(3, rng)
    blocks, similarity = jordan_form(s @ j @ invert(s), attempts=0)
    assert [b.size for b in blocks] == [3]
    _, target = block_layout([PencilBlock.finite(2, 3)])
    assert invert(similarity) @ s @ j @ invert(s) @ similarity == target
