import pytest

from slocc.core.census import CensusTable, TailSum, count_families, family_range, genuine_filter, table_from_entries
from slocc.core.state import StateShape
from slocc.errors import MissingOmega, NoQubitAxis

EXPECTED_COUNTS = [
    ((2, 2, 2, 2), 5),
    ((2, 2, 2, 4), 22),
    ((2, 4, 3, 2), 39),
    ((2, 4, 4, 2), 37),
    ((2, 4, 3, 3), 42),
    ((2, 4, 4, 3), 37),
    ((2, 4, 4, 4), 37),
]


@pytest.mark.parametrize("dims,count", EXPECTED_COUNTS)
def test_count_families(dims, count):
    assert count_families(StateShape(dims)) == count


def test_count_is_invariant_under_particle_order():
    assert count_families(StateShape.of(3, 2, 4, 2)) == 39
    assert count_families(StateShape.of(4, 4, 2, 2)) == 37


@pytest.mark.parametrize("dims,genuine", [
    ((2, 4, 3, 2), True),
    ((2, 2, 2, 2), True),
    ((2, 3, 4, 24), True),
    ((2, 3, 4, 25), False),
    ((2, 2, 2, 9), False),
])
def test_genuine_filter(dims, genuine):
    assert genuine_filter(StateShape(dims)).genuine is genuine


def test_genuine_filter_explanation():
    check = genuine_filter(StateShape.of(2, 3, 4, 25))
    assert "at most the genuine entanglement of 2x3x4x24" in check.explanation


def test_genuine_filter_rejects_trivial_particle():
    check = genuine_filter(StateShape.of(2, 4, 4, 1))
    assert not check.genuine
    assert "particle 4" in check.explanation


def test_family_range():
    assert family_range(StateShape.of(2, 4, 3, 2)) == (4, 3, 6)
    assert family_range(StateShape.of(2, 2, 2, 4)) == (4, 2, 4)


def test_no_qubit_axis():
    with pytest.raises(NoQubitAxis):
        count_families(StateShape.of(3, 3, 3, 3))


def test_missing_omega_names_the_entries():
    with pytest.raises(MissingOmega) as info:
        count_families(StateShape.of(2, 5, 3, 3))
    assert (5, 3) in info.value.entries


def test_tail_sum_used_only_for_whole_range():
    table = CensusTable.seeded()
    assert table.range_sum(4, 4, 8) == 16 + 12 + 6 + 3
    with pytest.raises(MissingOmega):
        table.range_sum(4, 7, 7)


def test_merge_extends_the_table():
    extra = table_from_entries([(5, 3, 9)])
    merged = CensusTable.seeded().merge(extra)
    assert merged.omega[(5, 3)] == 9
    assert merged.omega[(4, 4)] == 16
    assert TailSum(4, 7, 8, 3) in merged.tail_sums


def test_inconsistent_tail_sum_is_rejected():
    with pytest.raises(ValueError):
        table_from_entries([(4, 7, 2), (4, 8, 2)], [(4, 7, 8, 3)])
