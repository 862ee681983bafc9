"""Pipeline orchestration behind every CLI subcommand."""

from pathlib import Path
from typing import Optional
import asyncio
import logging
import random

from slocc.config import Settings, get_settings
from slocc.core.canonical import residual_orbit, standard_form
from slocc.core.census import CensusTable, count_families, family_range, genuine_filter
from slocc.core.decide import DecisionBudget, Verdict, decide_equivalence
from slocc.core.exact import ExactMatrix, format_scalar, rank
from slocc.core.pencil import canonical_pair
from slocc.core.realign import RealignmentShape, rank_one_factor, realign
from slocc.core.state import (
    LocalOperatorQuad,
    StateShape,
    StateTensor,
    apply_slocc,
    arrange_axes,
    local_ranks,
    random_state,
)
from slocc.errors import ParseError, WitnessVerificationError
from slocc.fixtures import CATALOG
from slocc.models.requests import StateFileModel
from slocc.models.responses import (
    ArrangementModel,
    CanonReport,
    CatalogItem,
    CensusReport,
    ClassifyReport,
    OrbitReport,
    RealignReport,
    RouteModel,
    StandardFormModel,
    VerdictReport,
    WitnessModel,
)
from slocc.parsers.base import BaseParser, ParsedState
from slocc.parsers.literal import parse_scalar
from slocc.parsers.matrix_parser import MatrixParser
from slocc.parsers.omega_parser import OmegaTableParser
from slocc.parsers.state_parser import KetParser, StateJSONParser
from slocc.services.result_store import ResultStore
from slocc.utils.formatting import matrix_to_literals
from slocc.utils.hashing import state_digest

logger = logging.getLogger(__name__)


def witness_model(quad: LocalOperatorQuad) -> WitnessModel:
    a1, a2, a3, a4 = (matrix_to_literals(m) for m in quad.operators)
    return WitnessModel(a1=a1, a2=a2, a3=a3, a4=a4)


def verdict_report(verdict: Verdict) -> VerdictReport:
    return VerdictReport(
        verdict=verdict.kind,
        witness=witness_model(verdict.witness) if verdict.witness is not None else None,
        reason=verdict.reason,
        diagnostics=verdict.diagnostics,
    )


class ClassifierService:
    """Loads inputs, runs the exact pipelines and assembles reports."""

    PARSERS: list[BaseParser] = [
        StateJSONParser(),
        KetParser(),
    ]

    def __init__(
        self,
        settings: Optional[Settings] = None,
        store: Optional[ResultStore] = None,
        matrix_parser: Optional[MatrixParser] = None
    ):
        self.settings = settings or get_settings()
        self.store = store
        self.matrix_parser = matrix_parser or MatrixParser()

    def get_parser(self, file_type: str) -> Optional[BaseParser]:
        """Get appropriate state parser for file type."""
        for parser in self.PARSERS:
            if parser.supports(file_type):
                return parser
        return None

    def is_supported(self, file_type: str) -> bool:
        return self.get_parser(file_type) is not None

    def budget(self, seed: Optional[int] = None, samples: Optional[int] = None,
               timeout_ms: Optional[int] = None) -> DecisionBudget:
        return DecisionBudget(
            samples=samples if samples is not None else self.settings.samples,
            timeout_ms=timeout_ms if timeout_ms is not None else self.settings.timeout_ms,
            max_minor_parameters=self.settings.max_minor_parameters,
            witness_attempts=self.settings.witness_attempts,
            lift_restarts=self.settings.lift_restarts,
            seed=seed if seed is not None else self.settings.seed,
        )

    # ==================== Loading ====================

    def load_state(self, file_path: Path) -> ParsedState:
        file_type = file_path.suffix.lstrip(".")
        parser = self.get_parser(file_type)
        if not parser:
            raise ParseError(f"Unsupported state file type: '{file_type or file_path.name}'")
        parsed = parser.parse(file_path)
        logger.debug(f"Loaded {file_path.name}: {parsed.tensor.shape}, {len(parsed.tensor.amplitudes)} terms")
        return parsed

    def load_census_table(self, omega_table: Optional[Path] = None) -> CensusTable:
        table = CensusTable.seeded()
        path = omega_table or self.settings.omega_table
        if path is not None:
            table = table.merge(OmegaTableParser().parse(Path(path)))
            logger.info(f"Merged Omega entries from {path}")
        return table

    # ==================== Classification ====================

    def classify(self, parsed: ParsedState) -> ClassifyReport:
        tensor = parsed.tensor.require_valid()
        arranged = arrange_axes(tensor, parsed.qubit_axis, parsed.single_axis)
        pair = arranged.pair()
        form, route = standard_form(arranged, self.settings.witness_attempts)
        verified = route.apply(pair.matrices) == form.matrices
        if not verified:
            raise WitnessVerificationError(f"{parsed.source}: standard form route failed verification")
        signature = form.signature()

        ranks = local_ranks(tensor)
        dims_check = genuine_filter(tensor.shape)
        full_ranks = all(r == d for r, d in zip(ranks, tensor.shape.dims))
        explanation = dims_check.explanation
        if dims_check.genuine and not full_ranks:
            deficient = [a + 1 for a, (r, d) in enumerate(zip(ranks, tensor.shape.dims)) if r != d]
            explanation = f"local rank deficient on particle(s) {', '.join(map(str, deficient))}"

        arrangement = arranged.arrangement
        logger.info(f"Classified {parsed.source or 'state'}: {signature.serialize()}")
        return ClassifyReport(
            source=parsed.source,
            shape=list(tensor.shape.dims),
            arrangement=ArrangementModel(
                qubit_axis=arrangement.qubit_axis,
                single_axis=arrangement.single_axis,
                composite_side=arrangement.composite_side.value,
                arranged_shape=list(arrangement.arranged_shape.dims),
            ),
            local_ranks=list(ranks),
            genuine=dims_check.genuine and full_ranks,
            genuine_explanation=explanation,
            signature=signature.serialize(),
            invariants=[format_scalar(v) for v in signature.invariants],
            family_parameters=[format_scalar(v) for v in signature.family_parameters],
            standard_form=StandardFormModel(
                blocks=[str(b) for b in form.blocks],
                e_part=matrix_to_literals(form.e_part),
                j_part=matrix_to_literals(form.j_part),
            ),
            route=RouteModel(
                t=matrix_to_literals(route.t),
                p=matrix_to_literals(route.p),
                q=matrix_to_literals(route.q),
                composite_side=route.composite_side.value,
            ),
            verified=verified,
        )

    def classify_file(self, file_path: Path) -> ClassifyReport:
        return self.classify(self.load_state(file_path))

    async def classify_cached(self, file_path: Path) -> tuple[ClassifyReport, str, bool]:
        """Classify through the result store; returns (report, digest, cache hit)."""
        parsed = self.load_state(file_path)
        digest = state_digest(parsed.tensor, parsed.qubit_axis, parsed.single_axis)
        if self.store is not None:
            cached = await self.store.get_report(digest)
            if cached is not None:
                logger.debug(f"Cache hit for {file_path.name} ({digest[:12]})")
                return cached.model_copy(update={"source": parsed.source}), digest, True

        loop = asyncio.get_running_loop()
        report = await loop.run_in_executor(None, self.classify, parsed)
        if self.store is not None:
            await self.store.save_report(digest, report)
        return report, digest, False

    # ==================== Comparison ====================

    def compare(self, first: ParsedState, second: ParsedState,
                budget: Optional[DecisionBudget] = None) -> VerdictReport:
        qubit_axis = first.qubit_axis if first.qubit_axis is not None else second.qubit_axis
        single_axis = first.single_axis if first.single_axis is not None else second.single_axis
        verdict = decide_equivalence(first.tensor, second.tensor, budget or self.budget(),
                                     qubit_axis=qubit_axis, single_axis=single_axis)
        logger.info(f"Compared {first.source or 'A'} with {second.source or 'B'}: {verdict.kind.value}")
        return verdict_report(verdict)

    # ==================== Thin wrappers ====================

    def census(self, shape: StateShape, table: Optional[CensusTable] = None) -> CensusReport:
        table = table or self.load_census_table()
        check = genuine_filter(shape)
        single, low, high = family_range(shape)
        return CensusReport(
            shape=list(shape.dims),
            genuine=check.genuine,
            genuine_explanation=check.explanation,
            single_dim=single,
            low=low,
            high=high,
            count=count_families(shape, table),
        )

    def realign_file(self, file_path: Path, shape: RealignmentShape) -> RealignReport:
        matrices = self.matrix_parser.parse(file_path)
        if len(matrices) != 1:
            raise ParseError(f"{file_path.name}: expected a single matrix, found {len(matrices)}")
        return self.realign(matrices[0], shape, file_path.name)

    def realign(self, x: ExactMatrix, shape: RealignmentShape, source: str = "") -> RealignReport:
        realigned = realign(x, shape)
        factors = rank_one_factor(x, shape)
        return RealignReport(
            source=source,
            factor_dims=[shape.m1, shape.m2, shape.n1, shape.n2],
            realigned=matrix_to_literals(realigned),
            rank=rank(realigned),
            left=matrix_to_literals(factors.left) if factors else None,
            right=matrix_to_literals(factors.right) if factors else None,
        )

    def orbit(self, value: str) -> OrbitReport:
        scalar = parse_scalar(value)
        return OrbitReport(value=format_scalar(scalar), orbit=[format_scalar(v) for v in residual_orbit(scalar)])

    def canon_file(self, file_path: Path) -> CanonReport:
        g1, g2 = self.matrix_parser.parse_pair(file_path)
        return self.canon(g1, g2, file_path.name)

    def canon(self, g1: ExactMatrix, g2: ExactMatrix, source: str = "") -> CanonReport:
        result = canonical_pair(g1, g2, self.settings.witness_attempts)
        verified = (result.p_witness @ g1 @ result.q_witness == result.canon1
                    and result.p_witness @ g2 @ result.q_witness == result.canon2)
        if not verified:
            raise WitnessVerificationError(f"{source or 'pair'}: canonical witnesses failed verification")
        return CanonReport(
            source=source,
            blocks=[str(b) for b in result.blocks],
            e_part=matrix_to_literals(result.canon1),
            j_part=matrix_to_literals(result.canon2),
            p=matrix_to_literals(result.p_witness),
            q=matrix_to_literals(result.q_witness),
            verified=verified,
        )

    def catalog(self) -> list[CatalogItem]:
        return [CatalogItem(name=e.name, shape=list(e.shape), ket=e.ket, note=e.note) for e in CATALOG]

    # ==================== Random states ====================

    def random_state(self, shape: StateShape, seed: Optional[int] = None,
                     entry_bound: Optional[int] = None, gaussian: bool = False) -> StateTensor:
        seed = seed if seed is not None else self.settings.seed
        bound = entry_bound if entry_bound is not None else self.settings.entry_bound
        return random_state(shape, bound, seed, gaussian).require_valid()

    def scramble(self, parsed: ParsedState, seed: Optional[int] = None) -> StateTensor:
        """Apply a random invertible quadruple of small Gaussian integers."""
        rng = random.Random(seed if seed is not None else self.settings.seed)
        quad = LocalOperatorQuad.random(parsed.tensor.shape, rng)
        return apply_slocc(parsed.tensor, quad)

    @staticmethod
    def to_state_file(tensor: StateTensor, qubit_axis: Optional[int] = None,
                      single_axis: Optional[int] = None) -> dict:
        model = StateFileModel(
            shape=list(tensor.shape.dims),
            qubit_axis=qubit_axis,
            single_axis=single_axis,
            terms=[{"idx": list(index), "amp": format_scalar(amp)} for index, amp in tensor.amplitudes.items()],
        )
        return model.model_dump(exclude_none=True, exclude={"ket"})
