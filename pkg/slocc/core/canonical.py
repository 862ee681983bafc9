"""Standard forms under (T, P, Q), family signatures and stabilizers."""

from dataclasses import dataclass, field
from itertools import permutations
import logging
import random
from typing import Optional, Sequence, Union

from slocc.core.exact import (
    ONE,
    ZERO,
    ExactMatrix,
    Scalar,
    div,
    field_key,
    format_scalar,
    gq,
    inverse,
    invert,
    is_invertible,
    random_gaussian_integer,
)
from slocc.core.pencil import (
    BlockKind,
    EquivalenceSystem,
    PencilBlock,
    block_layout,
    pencil_blocks,
    sort_blocks,
)
from slocc.core.state import (
    ArrangedState,
    CompositeSide,
    MatrixPair,
    StateTensor,
    apply_route,
    to_matrix_pair,
)
from slocc.errors import DegenerateLambda, WitnessVerificationError

logger = logging.getLogger(__name__)

Point = Optional[Scalar]  # None is the point at infinity


def _point_key(point: Point) -> tuple:
    return (0,) if point is None else (1,) + field_key(point)


# ==================== Mobius maps ====================

@dataclass(frozen=True)
class MobiusMap:
    """lambda -> (c + d*lambda) / (a + b*lambda), induced by T = [[a, b], [c, d]] on the pair."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self):
        if not (self.a * self.d - self.b * self.c):
            raise ValueError("Mobius map must have nonzero determinant")

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(ONE, ZERO, ZERO, ONE)

    @classmethod
    def from_matrix(cls, t: ExactMatrix) -> "MobiusMap":
        return cls(t[0, 0], t[0, 1], t[1, 0], t[1, 1])

    @classmethod
    def from_homogeneous(cls, h: Sequence[Sequence[Scalar]]) -> "MobiusMap":
        # (x, y) -> (d x + c y, b x + a y)
        return cls(a=h[1][1], b=h[1][0], c=h[0][1], d=h[0][0])

    @property
    def matrix(self) -> ExactMatrix:
        return ExactMatrix.from_rows([[self.a, self.b], [self.c, self.d]])

    def normalized(self) -> "MobiusMap":
        """Representative with first nonzero entry equal to 1."""
        lead = next(v for v in (self.a, self.b, self.c, self.d) if v)
        scale = inverse(lead)
        return MobiusMap(self.a * scale, self.b * scale, self.c * scale, self.d * scale)

    def apply(self, point: Point) -> Point:
        x, y = (ONE, ZERO) if point is None else (point, ONE)
        num = self.d * x + self.c * y
        den = self.b * x + self.a * y
        return None if not den else div(num, den)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """Map applying ``other`` first, then ``self``."""
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def __str__(self) -> str:
        return (f"lambda -> ({format_scalar(self.c)} + {format_scalar(self.d)}*lambda)"
                f" / ({format_scalar(self.a)} + {format_scalar(self.b)}*lambda)")


def _homogeneous(point: Point) -> tuple[Scalar, Scalar]:
    return (ONE, ZERO) if point is None else (point, ONE)


def _dot(h: tuple[Scalar, Scalar], p: tuple[Scalar, Scalar]) -> Scalar:
    return h[0] * p[0] + h[1] * p[1]


def anchor_map(anchors: Sequence[Point]) -> MobiusMap:
    """Mobius map sending the anchors to infinity, 0 and 1 (in that order)."""
    if not anchors:
        return MobiusMap.identity()
    p1 = _homogeneous(anchors[0])
    if len(anchors) == 1:
        if anchors[0] is None:
            return MobiusMap.identity()
        h2 = (p1[1], -p1[0])
        h1 = (ONE, ZERO) if p1[0] else (ZERO, ONE)
        return MobiusMap.from_homogeneous([h1, h2])
    p2 = _homogeneous(anchors[1])
    h1 = (p2[1], -p2[0])
    h2 = (-p1[1], p1[0])
    if len(anchors) >= 3:
        p3 = _homogeneous(anchors[2])
        s1, s2 = inverse(_dot(h1, p3)), inverse(_dot(h2, p3))
        h1 = (h1[0] * s1, h1[1] * s1)
        h2 = (h2[0] * s2, h2[1] * s2)
    return MobiusMap.from_homogeneous([h1, h2])


def map_blocks(blocks: Sequence[PencilBlock], mobius: MobiusMap) -> list[PencilBlock]:
    mapped = []
    for block in blocks:
        if not block.is_regular:
            mapped.append(block)
            continue
        point = mobius.apply(None if block.kind == BlockKind.INFINITE else block.eigenvalue)
        mapped.append(PencilBlock.infinite(block.size) if point is None
                      else PencilBlock.finite(point, block.size))
    return sort_blocks(mapped)


def regular_points(blocks: Sequence[PencilBlock]) -> dict[tuple, tuple[Point, tuple[int, ...]]]:
    """Distinct eigenvalue points with their Segre characteristic (sizes, descending)."""
    grouped: dict[tuple, list] = {}
    for block in blocks:
        if not block.is_regular:
            continue
        point = None if block.kind == BlockKind.INFINITE else block.eigenvalue
        grouped.setdefault(_point_key(point), [point, []])[1].append(block.size)
    return {k: (p, tuple(sorted(sizes, reverse=True))) for k, (p, sizes) in grouped.items()}


def _class_key(sizes: tuple[int, ...]) -> tuple:
    # largest Jordan size first, then most repeated, then the full characteristic
    return (-sizes[0], -len(sizes), tuple(-s for s in sizes))


def _config_key(blocks: Sequence[PencilBlock]) -> tuple:
    return tuple(b.sort_key() for b in blocks)


def mobius_normalize(blocks: Sequence[PencilBlock]) -> tuple[list[PencilBlock], MobiusMap, ExactMatrix]:
    """Move the three highest-priority eigenvalues to (infinity, 0, 1).

    Among all admissible anchorings the configuration with the smallest
    canonical block order wins, so the remaining free eigenvalues are stored
    as orbit minima.
    """
    points = regular_points(blocks)
    ordered = sorted(points.values(), key=lambda item: (_class_key(item[1]), _point_key(item[0])))
    k = min(3, len(ordered))
    if k == 0:
        return sort_blocks(blocks), MobiusMap.identity(), ExactMatrix.identity(2)

    anchor_classes = [_class_key(sizes) for _, sizes in ordered[:k]]
    best: Optional[tuple[tuple, list[PencilBlock], MobiusMap]] = None
    for choice in permutations(ordered, k):
        if [_class_key(sizes) for _, sizes in choice] != anchor_classes:
            continue
        mobius = anchor_map([p for p, _ in choice])
        mapped = map_blocks(blocks, mobius)
        key = _config_key(mapped)
        if best is None or key < best[0]:
            best = (key, mapped, mobius)

    _, normalized, mobius = best
    return normalized, mobius, mobius.matrix


def residual_orbit(value: Scalar) -> list[Scalar]:
    """The six cross-ratio values related by 1/x and 1-x, sorted by field order."""
    value = gq(value)
    if not value or value == ONE:
        raise DegenerateLambda(f"cross ratio {format_scalar(value)} has a degenerate orbit")
    one = ONE
    orbit = {
        value,
        inverse(value),
        one - value,
        div(value, value - one),
        inverse(one - value),
        one - inverse(value),
    }
    return sorted(orbit, key=field_key)


# ==================== Standard forms ====================

@dataclass(frozen=True)
class FamilySignature:
    skeleton: tuple[str, ...]
    invariants: tuple[Scalar, ...]

    def serialize(self) -> str:
        return ",".join(self.skeleton) + ";" + ",".join(format_scalar(v) for v in self.invariants)

    @property
    def family_parameters(self) -> tuple[Scalar, ...]:
        """Gamma_1 entry of the psi(lambda)-type representative: 1/x per free eigenvalue x."""
        return tuple(inverse(v) for v in self.invariants if v)

    def __str__(self) -> str:
        return self.serialize()


@dataclass(frozen=True)
class StandardForm:
    blocks: tuple[PencilBlock, ...]
    e_part: ExactMatrix
    j_part: ExactMatrix

    @classmethod
    def from_blocks(cls, blocks: Sequence[PencilBlock]) -> "StandardForm":
        e_part, j_part = block_layout(blocks)
        return cls(tuple(blocks), e_part, j_part)

    @property
    def matrices(self) -> tuple[ExactMatrix, ExactMatrix]:
        return (self.e_part, self.j_part)

    def signature(self) -> FamilySignature:
        free_points = sorted(
            {field_key(b.eigenvalue): b.eigenvalue for b in self.blocks
             if b.kind == BlockKind.FINITE and b.eigenvalue not in (ZERO, ONE)}.values(),
            key=field_key,
        )
        labels = {field_key(v): f"f{k + 1}" for k, v in enumerate(free_points)}
        labels[field_key(ZERO)] = "0"
        labels[field_key(ONE)] = "1"
        skeleton = tuple(
            b.label(labels[field_key(b.eigenvalue)]) if b.kind == BlockKind.FINITE else b.label()
            for b in self.blocks
        )
        return FamilySignature(skeleton, tuple(free_points))


@dataclass(frozen=True)
class RouteTriple:
    t: ExactMatrix
    p: ExactMatrix
    q: ExactMatrix
    composite_side: CompositeSide

    @classmethod
    def identity(cls, pair: MatrixPair) -> "RouteTriple":
        r, c = pair.shape
        return cls(ExactMatrix.identity(2), ExactMatrix.identity(r), ExactMatrix.identity(c), pair.composite_side)

    def apply(self, matrices: Sequence[ExactMatrix]) -> tuple[ExactMatrix, ExactMatrix]:
        return apply_route(matrices, self.t, self.p, self.q)

    def inverse(self) -> "RouteTriple":
        return RouteTriple(invert(self.t), invert(self.p), invert(self.q), self.composite_side)

    def then(self, other: "RouteTriple") -> "RouteTriple":
        """Route applying ``self`` first, then ``other``."""
        return RouteTriple(other.t @ self.t, other.p @ self.p, self.q @ other.q, self.composite_side)


def _as_pair(state: Union[ArrangedState, StateTensor, MatrixPair]) -> MatrixPair:
    if isinstance(state, MatrixPair):
        return state
    if isinstance(state, ArrangedState):
        return state.pair()
    return to_matrix_pair(state)


def standard_form(state: Union[ArrangedState, StateTensor, MatrixPair],
                  attempts: int = 24) -> tuple[StandardForm, RouteTriple]:
    """Standard form of an arranged state with the route (T0, P0, Q0) reaching it."""
    pair = _as_pair(state)
    blocks = pencil_blocks(pair.gamma1, pair.gamma2)
    normalized, mobius, t = mobius_normalize(blocks)
    form = StandardForm.from_blocks(normalized)

    if pair.matrices == form.matrices:
        return form, RouteTriple.identity(pair)

    r, c = pair.shape
    turned = apply_route(pair.matrices, t, ExactMatrix.identity(r), ExactMatrix.identity(c))
    found = EquivalenceSystem(turned, form.matrices).witness(attempts)
    if found is None:
        raise WitnessVerificationError("no (P, Q) reaches the normalized standard form")
    p, q = found
    route = RouteTriple(t, p, q, pair.composite_side)
    if route.apply(pair.matrices) != form.matrices:
        raise WitnessVerificationError("standard form route failed exact verification")
    logger.debug(f"Standard form {form.signature().serialize()} reached")
    return form, route


def signature_of(state: Union[ArrangedState, StateTensor, MatrixPair]) -> FamilySignature:
    pair = _as_pair(state)
    normalized, _, _ = mobius_normalize(pencil_blocks(pair.gamma1, pair.gamma2))
    return StandardForm.from_blocks(normalized).signature()


# ==================== Stabilizers ====================

@dataclass
class StabilizerElement:
    """One Mobius stabilizer element with its linear family of compensations.

    Instantiations (s1, s2, s3) satisfy s1 o (s2 K s3) = K with
    s2 = X(params) and s3 = Y(params)^-1.
    """

    mobius: MobiusMap
    s1: ExactMatrix
    system: EquivalenceSystem

    @property
    def x_parameters(self) -> int:
        return len(self.system.x_basis)

    @property
    def free_parameters(self) -> int:
        return len(self.system.free_rows) * self.system.cols

    @property
    def parameter_count(self) -> int:
        return self.x_parameters + self.free_parameters

    def instantiate(self, values: Sequence[Scalar]) -> Optional[tuple[ExactMatrix, ExactMatrix, ExactMatrix]]:
        values = [gq(v) for v in values]
        x = self.system.combination(values[:self.x_parameters])
        free_values = values[self.x_parameters:]
        free = None
        if self.system.free_rows:
            free = ExactMatrix(len(self.system.free_rows), self.system.cols, free_values)
        y = self.system.assemble_y(self.system.y_determined(x), free)
        if not (is_invertible(x) and is_invertible(y)):
            return None
        s3 = invert(y)
        if apply_route((x @ self.system.target[0] @ s3, x @ self.system.target[1] @ s3),
                       self.s1, ExactMatrix.identity(x.rows), ExactMatrix.identity(s3.rows)) != self.system.target:
            raise WitnessVerificationError("stabilizer instantiation does not fix the standard form")
        return self.s1, x, s3

    def sample(self, rng: random.Random, tries: int = 20) -> Optional[tuple[ExactMatrix, ExactMatrix, ExactMatrix]]:
        for _ in range(tries):
            found = self.instantiate([random_gaussian_integer(rng, 3) for _ in range(self.parameter_count)])
            if found is not None:
                return found
        return None


@dataclass
class StabilizerDescription:
    form: StandardForm
    elements: list[StabilizerElement]
    continuous_mobius: bool
    fixed_points: list[Point] = field(default_factory=list)

    @property
    def commutant_generators(self) -> list[ExactMatrix]:
        """Basis of the row-side operators compensating the identity qubit operator."""
        return list(self.elements[0].system.x_basis)

    def compensate(self, s1: ExactMatrix) -> Optional[StabilizerElement]:
        """Element for an arbitrary qubit operator, or None if it does not stabilize."""
        turned = apply_route(self.form.matrices, s1, ExactMatrix.identity(self.form.e_part.rows),
                             ExactMatrix.identity(self.form.e_part.cols))
        system = EquivalenceSystem(turned, self.form.matrices)
        if system.witness() is None:
            return None
        return StabilizerElement(MobiusMap.from_matrix(s1), s1, system)

    def sample_mobius(self, rng: random.Random, bound: int = 3) -> MobiusMap:
        """Random element of the continuous Mobius freedom fixing the normalized points."""
        while True:
            a, b, c, d = (random_gaussian_integer(rng, bound) for _ in range(4))
            if self.fixed_points:
                b = ZERO  # infinity fixed
            if len(self.fixed_points) >= 2:
                c = ZERO  # zero fixed
            if a * d - b * c:
                return MobiusMap(a, b, c, d)


def mobius_stabilizer(blocks: Sequence[PencilBlock]) -> tuple[list[MobiusMap], bool]:
    """Finite Mobius maps preserving the normalized eigenvalue structure.

    The flag is True when fewer than three distinct eigenvalues leave a
    continuous family; the list then holds the finitely many coset
    representatives permuting the points.
    """
    points = list(regular_points(blocks).values())
    structure = {_point_key(p): sizes for p, sizes in points}
    if len(points) < 3:
        maps = [MobiusMap.identity()]
        if len(points) == 2 and points[0][1] == points[1][1]:
            maps.append(MobiusMap(ZERO, ONE, ONE, ZERO))  # swaps infinity and 0
        return maps, True

    found: dict[tuple, MobiusMap] = {}
    base = anchor_map([p for p, _ in points[:3]])
    for triple in permutations(points, 3):
        mobius = _inverse_map(anchor_map([p for p, _ in triple])).compose(base)
        preserved = all(
            structure.get(_point_key(mobius.apply(p))) == sizes for p, sizes in points
        )
        if preserved:
            rep = mobius.normalized()
            found[tuple(field_key(v) for v in (rep.a, rep.b, rep.c, rep.d))] = rep
    return [found[k] for k in sorted(found)], False


def _inverse_map(mobius: MobiusMap) -> MobiusMap:
    return MobiusMap.from_matrix(invert(mobius.matrix))


def stabilizer(form: StandardForm) -> StabilizerDescription:
    maps, continuous = mobius_stabilizer(form.blocks)
    r, c = form.e_part.shape
    elements = []
    for mobius in maps:
        s1 = mobius.matrix
        turned = apply_route(form.matrices, s1, ExactMatrix.identity(r), ExactMatrix.identity(c))
        system = EquivalenceSystem(turned, form.matrices)
        if mobius == MobiusMap.identity() or system.x_basis:
            elements.append(StabilizerElement(mobius, s1, system))
    fixed = [p for p, _ in regular_points(form.blocks).values()] if continuous else []
    logger.debug(f"Stabilizer with {len(elements)} Mobius elements, continuous={continuous}")
    return StabilizerDescription(form, elements, continuous, fixed)
