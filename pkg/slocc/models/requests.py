from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class StateTerm(BaseModel):
    idx: list[int] = Field(..., min_length=3, max_length=4)
    amp: str = Field(default="1", min_length=1)

    @field_validator("amp", mode="before")
    @classmethod
    def amp_as_text(cls, value):
        # bare JSON numbers are accepted as literals
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"amplitude {value} is not exact; write it as a fraction string")
            return str(int(value))
        return value


class StateFileModel(BaseModel):
    """State file: explicit terms or a ket string over a 2xLxMxN shape."""

    shape: list[int] = Field(..., min_length=3, max_length=4)
    qubit_axis: Optional[int] = Field(None, ge=1, le=4)
    single_axis: Optional[int] = Field(None, ge=1, le=4)
    terms: list[StateTerm] = Field(default_factory=list)
    ket: Optional[str] = None

    @field_validator("shape")
    @classmethod
    def positive_dims(cls, value: list[int]) -> list[int]:
        if any(d < 1 for d in value):
            raise ValueError(f"dimensions must be positive, got {value}")
        return value

    @model_validator(mode="after")
    def embed_tripartite(self) -> "StateFileModel":
        if not self.terms and not self.ket:
            raise ValueError("state file needs 'terms' or 'ket'")
        if len(self.shape) == 3:
            self.shape = self.shape + [1]
            for term in self.terms:
                if len(term.idx) == 3:
                    term.idx = term.idx + [1]
        if any(len(term.idx) != 4 for term in self.terms):
            raise ValueError("every term index must address four particles")
        if self.qubit_axis is not None and self.qubit_axis == self.single_axis:
            raise ValueError("qubit_axis and single_axis must differ")
        return self


class OmegaEntry(BaseModel):
    L: int = Field(..., ge=1)
    i: int = Field(..., ge=1)
    count: int = Field(..., ge=0)


class TailSumEntry(BaseModel):
    L: int = Field(..., ge=1)
    start: int = Field(..., ge=1, alias="from")
    stop: int = Field(..., ge=1, alias="to")
    count: int = Field(..., ge=0)

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def ordered(self) -> "TailSumEntry":
        if self.stop < self.start:
            raise ValueError(f"tail sum range {self.start}..{self.stop} is empty")
        return self


class OmegaFileModel(BaseModel):
    omega: list[OmegaEntry] = Field(default_factory=list)
    tail_sums: list[TailSumEntry] = Field(default_factory=list)


class RunConfig(BaseModel):
    subcommand: str = Field(..., min_length=1)
    inputs: list[Path] = Field(default_factory=list)
    output_format: OutputFormat = OutputFormat.TEXT
    seed: int = 20240101
    samples: int = Field(default=64, ge=1)
    timeout_ms: int = Field(default=60_000, ge=1)
    omega_table: Optional[Path] = None
    batch: Optional[Path] = None
