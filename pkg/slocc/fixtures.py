"""Reference states and matrices with known classification results."""

from dataclasses import dataclass
from typing import Mapping, Sequence

from slocc.core.exact import ExactMatrix, ScalarLike, div, gq
from slocc.core.state import StateShape, StateTensor, parse_ket


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    shape: tuple[int, int, int, int]
    ket: str
    note: str = ""

    def state(self) -> StateTensor:
        return parse_ket(self.ket, StateShape(self.shape))


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry("2222-ghz", (2, 2, 2, 2), "|1111> + |1222> + |2111>", "from 2x2x2"),
    CatalogEntry("2222-w", (2, 2, 2, 2), "|1111> + |1222> + |2122>", "from 2x2x2"),
    CatalogEntry("2222-223a", (2, 2, 2, 2), "|1111> + |1212> + |2221>", "from 2x2x3"),
    CatalogEntry("2222-223b", (2, 2, 2, 2), "|1111> + |1212> + |2112> + |2221>", "from 2x2x3"),
    CatalogEntry("2222-224", (2, 2, 2, 2), "|1111> + |1212> + |2121> + |2222>", "from 2x2x4"),
    CatalogEntry("2224-224", (2, 2, 2, 4), "|1111> + |1222> + |2113> + |2224>", "from 2x2x4"),
    CatalogEntry("2224-234a", (2, 2, 2, 4), "|1111> + |1122> + |1213> + |2214>", "from 2x3x4"),
    CatalogEntry("2224-234b", (2, 2, 2, 4), "|1111> + |1122> + |1213> + |2112> + |2214>", "from 2x3x4"),
    CatalogEntry("2224-234c", (2, 2, 2, 4), "|1111> + |1122> + |1213> + |2111> + |2214>", "from 2x3x4"),
    CatalogEntry("2224-234d", (2, 2, 2, 4), "|1111> + |1122> + |1213> + |2123> + |2214>", "from 2x3x4"),
    CatalogEntry(
        "2432-worked", (2, 4, 3, 2),
        "|1111> + |1112> + |1122> + |1131> + |1212> + |1312> + |1332> + |1422> + |1432>"
        " + |2121> + |2122> + |2131> + |2211> + |2221> + |2222> + |2232> + |2311> + |2321>"
        " + |2322> + |2332> + |2411> + |2422>",
        "random 2x4x3x2 state with a one-eigenvalue standard form",
    ),
)


def catalog_entry(name: str) -> CatalogEntry:
    for entry in CATALOG:
        if entry.name == name:
            return entry
    raise KeyError(f"unknown catalog entry '{name}'")


# ==================== Worked 2x4x3x2 example ====================

WORKED_SHAPE = StateShape((2, 4, 3, 2))

WORKED_GAMMA1 = ExactMatrix.from_rows([
    [1, 1, 0, 1, 1, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 0, 1, 0, 1],
])
WORKED_GAMMA2 = ExactMatrix.from_rows([
    [0, 0, 1, 1, 1, 0],
    [1, 0, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 1],
    [1, 0, 0, 1, 0, 0],
])
WORKED_P0 = ExactMatrix.from_rows([
    [0, 1, -1, 0],
    [1, 2, -3, 2],
    [0, -1, 2, -1],
    [1, 1, -2, 1],
])
WORKED_Q0 = ExactMatrix.from_rows([
    [0, -1, 0, 2, 0, -1],
    [1, 1, 1, -1, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 1, 0, -1, 0, 0],
    [-1, -1, 0, 1, 0, 1],
    [-1, 0, 0, 0, 0, 0],
])
LAMBDA = ExactMatrix.from_rows([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
])
B_MATRIX = ExactMatrix.from_rows([
    [0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
])


def worked_state() -> StateTensor:
    return catalog_entry("2432-worked").state()


def unipotent_stabilizer(alpha: ScalarLike) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """(S1, S2, S3) fixing (LAMBDA, B_MATRIX) for every alpha."""
    a = gq(alpha)
    s1 = ExactMatrix.from_rows([[1, a], [0, 1]])
    s2 = ExactMatrix.from_rows([
        [1, 0, 0, 0],
        [0, 1, 0, a],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ])
    s3 = ExactMatrix.from_rows([
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, -2 * a, 0, a * a],
        [0, 0, 1, 0, -a, 0],
        [0, 0, 0, 1, 0, -a],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
    ])
    return s1, s2, s3


def commutant_stabilizer(a: Mapping[str, ScalarLike]) -> tuple[ExactMatrix, ExactMatrix]:
    """(S, S') with S LAMBDA S' = LAMBDA and S B S' = B.

    Keys are a11, a21, a22, a31, a32, a33, a34; a11, a22, a33 must be nonzero.
    """
    a11, a21, a22, a31, a32, a33, a34 = (gq(a[k]) for k in ("a11", "a21", "a22", "a31", "a32", "a33", "a34"))
    zero = gq(0)
    s = ExactMatrix.from_rows([
        [div(gq(1), a11), zero, zero, zero],
        [-div(a21, a11 * a22), div(gq(1), a22), zero, zero],
        [div(a21 * a32 - a22 * a31, a11 * a22 * a33), -div(a32, a22 * a33), div(gq(1), a33),
         -div(a34, a22 * a33)],
        [zero, zero, zero, div(gq(1), a22)],
    ])
    s_prime = ExactMatrix.from_rows([
        [a11, zero, zero, zero, zero, zero],
        [a21, a22, zero, zero, zero, zero],
        [a31, a32, a33, a34, zero, zero],
        [zero, zero, zero, a22, zero, zero],
        [zero, zero, zero, a32, a33, a34],
        [zero, zero, zero, zero, zero, a22],
    ])
    return s, s_prime


# ==================== psi(lambda) family ====================

PSI_SHAPE = StateShape((2, 2, 2, 4))
PSI_TRIPARTITE_SHAPE = StateShape((2, 4, 4, 1))


def psi_lambda_pair(lam: ScalarLike) -> tuple[ExactMatrix, ExactMatrix]:
    return ExactMatrix.diag([0, 1, gq(lam), 1]), ExactMatrix.diag([1, 1, 1, 0])


def _diagonal_amplitudes(gammas: Sequence[ExactMatrix]) -> dict[int, list]:
    return {i: [g[k, k] for k in range(g.rows)] for i, g in enumerate(gammas, start=1)}


def psi_lambda(lam: ScalarLike) -> StateTensor:
    """psi(lambda) on 2x2x2x4; particles 2 and 3 carry the composite row index."""
    amplitudes = {}
    for i, diagonal in _diagonal_amplitudes(psi_lambda_pair(lam)).items():
        for k, v in enumerate(diagonal):
            amplitudes[(i, k // 2 + 1, k % 2 + 1, k + 1)] = v
    return StateTensor.create(PSI_SHAPE, amplitudes)


def psi_lambda_tripartite(lam: ScalarLike) -> StateTensor:
    """psi(lambda) as a 2x4x4 state embedded with a trivial fourth particle."""
    amplitudes = {}
    for i, diagonal in _diagonal_amplitudes(psi_lambda_pair(lam)).items():
        for k, v in enumerate(diagonal):
            amplitudes[(i, k + 1, k + 1, 1)] = v
    return StateTensor.create(PSI_TRIPARTITE_SHAPE, amplitudes)


def symmetry_g() -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """(T, P, Q) taking the pair of psi(lambda) to that of psi(1 - lambda)."""
    t = ExactMatrix.from_rows([[-1, 1], [0, 1]])
    p = ExactMatrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])
    q = ExactMatrix.from_rows([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    return t, p, q


def symmetry_f(lam: ScalarLike) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """(T, P, Q) taking the pair of psi(lambda) to that of psi(1 / lambda)."""
    lam = gq(lam)
    t = ExactMatrix.from_rows([[div(gq(1), lam), 0], [0, 1]])
    p = ExactMatrix.from_rows([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, lam]])
    q = ExactMatrix.from_rows([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    return t, p, q


# ==================== Three-eigenvalue 2x4x4 state ====================

def three_lambda_state(l1: ScalarLike, l2: ScalarLike, l3: ScalarLike) -> StateTensor:
    """|111> + |122> + |133> + |144> + l1|211> + l2|222> + l3|233>, embedded as 2x4x4x1."""
    amplitudes = {(1, k, k, 1): 1 for k in range(1, 5)}
    for k, lam in enumerate((l1, l2, l3), start=1):
        amplitudes[(2, k, k, 1)] = lam
    return StateTensor.create(PSI_TRIPARTITE_SHAPE, amplitudes)


def three_lambda_cross_ratio(l1: ScalarLike, l2: ScalarLike, l3: ScalarLike):
    l1, l2, l3 = gq(l1), gq(l2), gq(l3)
    return div(l2 * (l1 - l3), l3 * (l1 - l2))


def three_lambda_reduction(l1: ScalarLike, l2: ScalarLike,
                           l3: ScalarLike) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """(T, P, Q) taking (E, diag(l1, l2, l3, 0)) to psi(lambda) with the cross ratio above."""
    l1, l2, l3 = gq(l1), gq(l2), gq(l3)
    t = ExactMatrix.from_rows([
        [div(l2, l1 - l2), -div(l2, l1 * (l1 - l2))],
        [0, div(gq(1), l1)],
    ])
    p = ExactMatrix.diag([1, div(l1, l2), div(l1, l3), div(l1 - l2, l2)])
    return t, p, ExactMatrix.identity(4)
