"""Genuine-entanglement filtering and entanglement-family counts."""

from dataclasses import dataclass, field
import logging
from typing import Iterable, Optional

from slocc.core.state import StateShape
from slocc.errors import MissingOmega, NoQubitAxis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TailSum:
    single_dim: int
    start: int
    stop: int
    count: int

    def covers(self, i: int) -> bool:
        return self.start <= i <= self.stop


@dataclass
class CensusTable:
    """Omega(L, i): genuine classes of the 2 x L x i system, plus aggregate tail sums."""

    omega: dict[tuple[int, int], int] = field(default_factory=dict)
    tail_sums: list[TailSum] = field(default_factory=list)

    @classmethod
    def seeded(cls) -> "CensusTable":
        table = cls(
            omega={
                (2, 2): 2, (2, 3): 2, (2, 4): 1,
                (4, 2): 1, (4, 3): 5, (4, 4): 16, (4, 5): 12, (4, 6): 6,
            },
            tail_sums=[TailSum(4, 7, 8, 3)],
        )
        return table

    def merge(self, other: "CensusTable") -> "CensusTable":
        merged = CensusTable(dict(self.omega), list(self.tail_sums))
        merged.omega.update(other.omega)
        merged.tail_sums.extend(t for t in other.tail_sums if t not in merged.tail_sums)
        merged.check_consistency()
        return merged

    def check_consistency(self) -> None:
        for tail in self.tail_sums:
            known = [self.omega.get((tail.single_dim, i)) for i in range(tail.start, tail.stop + 1)]
            if all(v is not None for v in known) and sum(known) != tail.count:
                raise ValueError(
                    f"tail sum Omega({tail.single_dim}, {tail.start}..{tail.stop}) = {tail.count} "
                    f"disagrees with individual entries summing to {sum(known)}"
                )

    def range_sum(self, single_dim: int, start: int, stop: int) -> int:
        """Sum of Omega(L, i) for start <= i <= stop, using tail sums where entries are unknown."""
        total = 0
        missing = []
        i = start
        while i <= stop:
            if (single_dim, i) in self.omega:
                total += self.omega[(single_dim, i)]
                i += 1
                continue
            tail = self._tail_from(single_dim, i, stop)
            if tail is None:
                missing.append((single_dim, i))
                i += 1
                continue
            total += tail.count
            i = tail.stop + 1
        if missing:
            raise MissingOmega(missing)
        return total

    def _tail_from(self, single_dim: int, i: int, stop: int) -> Optional[TailSum]:
        for tail in self.tail_sums:
            if tail.single_dim == single_dim and tail.start == i and tail.stop <= stop:
                return tail
        return None


@dataclass(frozen=True)
class GenuineCheck:
    genuine: bool
    explanation: str


def _split(shape: StateShape) -> tuple[int, int, int]:
    dims = list(shape.dims)
    if 2 not in dims:
        raise NoQubitAxis(f"shape {shape} has no qubit particle")
    dims.remove(2)
    single, m, n = sorted(dims, reverse=True)
    return single, m, n


def genuine_filter(shape: StateShape) -> GenuineCheck:
    """Largest non-qubit dimension must not exceed twice the product of the other two."""
    if any(d == 1 for d in shape.dims):
        particle = shape.dims.index(1) + 1
        return GenuineCheck(False, f"particle {particle} has dimension 1, so the state is not genuinely four-partite")
    single, m, n = _split(shape)
    if single > 2 * m * n:
        particle = shape.dims.index(single) + 1
        capped = [d if d != single else 2 * m * n for d in shape.dims]
        return GenuineCheck(
            False,
            f"particle {particle} of dimension {single} exceeds 2*{m}*{n}; "
            f"at most the genuine entanglement of {'x'.join(map(str, capped))}",
        )
    return GenuineCheck(True, f"{single} <= 2*{m}*{n}")


def family_range(shape: StateShape) -> tuple[int, int, int]:
    """(L, d, D) with the count summing Omega(L, i) for d <= i <= D."""
    single, m, n = _split(shape)
    low = max(m, n, -(-single // 2))
    high = min(2 * single, m * n)
    return single, low, high


def count_families(shape: StateShape, table: Optional[CensusTable] = None) -> int:
    table = table or CensusTable.seeded()
    check = genuine_filter(shape)
    if not check.genuine:
        logger.warning(f"Counting families of a non-genuine shape {shape}: {check.explanation}")
    single, low, high = family_range(shape)
    count = table.range_sum(single, low, high)
    logger.debug(f"N_f({shape}) = sum Omega({single}, {low}..{high}) = {count}")
    return count


def table_from_entries(omega: Iterable[tuple[int, int, int]],
                       tail_sums: Iterable[tuple[int, int, int, int]] = ()) -> CensusTable:
    table = CensusTable(
        omega={(single, i): count for single, i, count in omega},
        tail_sums=[TailSum(*t) for t in tail_sums],
    )
    table.check_consistency()
    return table
