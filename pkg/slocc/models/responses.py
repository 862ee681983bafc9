from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict

from slocc.core.decide import InequivalenceReason, Verdict, VerdictKind

# Matrices travel as rows of Gaussian-rational literals
MatrixLiterals = list[list[str]]


class ItemStatus(str, Enum):
    COMPLETED = "completed"
    CACHED = "cached"
    FAILED = "failed"


class ArrangementModel(BaseModel):
    qubit_axis: int
    single_axis: int
    composite_side: str
    arranged_shape: list[int]


class StandardFormModel(BaseModel):
    blocks: list[str]
    e_part: MatrixLiterals
    j_part: MatrixLiterals


class RouteModel(BaseModel):
    t: MatrixLiterals
    p: MatrixLiterals
    q: MatrixLiterals
    composite_side: str


class WitnessModel(BaseModel):
    a1: MatrixLiterals
    a2: MatrixLiterals
    a3: MatrixLiterals
    a4: MatrixLiterals


# Classification
class ClassifyReport(BaseModel):
    source: str
    shape: list[int]
    arrangement: ArrangementModel
    local_ranks: list[int]
    genuine: bool
    genuine_explanation: str
    signature: str
    invariants: list[str]
    family_parameters: list[str]
    standard_form: StandardFormModel
    route: RouteModel
    verified: bool

    model_config = ConfigDict(from_attributes=True)


class VerdictReport(BaseModel):
    verdict: VerdictKind
    witness: Optional[WitnessModel]
    reason: Optional[InequivalenceReason]
    diagnostics: dict[str, Any]

    @property
    def exit_code(self) -> int:
        return Verdict(self.verdict).exit_code


# Thin wrappers
class CensusReport(BaseModel):
    shape: list[int]
    genuine: bool
    genuine_explanation: str
    single_dim: int
    low: int
    high: int
    count: int


class RealignReport(BaseModel):
    source: str
    factor_dims: list[int]
    realigned: MatrixLiterals
    rank: int
    left: Optional[MatrixLiterals]
    right: Optional[MatrixLiterals]


class OrbitReport(BaseModel):
    value: str
    orbit: list[str]


class CanonReport(BaseModel):
    source: str
    blocks: list[str]
    e_part: MatrixLiterals
    j_part: MatrixLiterals
    p: MatrixLiterals
    q: MatrixLiterals
    verified: bool


class CatalogItem(BaseModel):
    name: str
    shape: list[int]
    ket: str
    note: str


# Batch
class BatchItem(BaseModel):
    source: str
    status: ItemStatus
    digest: Optional[str] = None
    signature: Optional[str] = None
    report_path: Optional[str] = None
    error_message: Optional[str] = None


class BatchSummary(BaseModel):
    items: list[BatchItem]
    count: int
    completed: int
    cached: int
    failed: int
    elapsed_ms: float
