from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar, Generic, Optional, TypeVar
import json

from slocc.core.state import StateTensor
from slocc.errors import ParseError

T = TypeVar("T")


@dataclass(frozen=True)
class ParsedState:
    tensor: StateTensor
    qubit_axis: Optional[int] = None
    single_axis: Optional[int] = None
    source: str = ""


class BaseParser(ABC, Generic[T]):
    """Text input formats, selected by file suffix."""

    suffixes: ClassVar[tuple[str, ...]] = ()

    def supports(self, file_type: str) -> bool:
        return file_type.lower() in self.suffixes

    def parse(self, file_path: Path) -> T:
        with open(file_path, "r", encoding="utf-8") as f:
            return self.parse_text(f.read(), file_path.name)

    @abstractmethod
    def parse_text(self, text: str, source: str = "") -> T:
        """Parse file contents; `source` names the input in error messages."""


class JSONParser(BaseParser[T]):
    suffixes = ("json",)

    def parse_text(self, text: str, source: str = "") -> T:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{source or 'input'}: invalid JSON: {e.msg}", e.pos)
        return self.parse_data(data, source)

    @abstractmethod
    def parse_data(self, data: dict, source: str = "") -> T:
        """Validate an already decoded document."""
