"""Text renderings of exact matrices."""

from typing import Sequence

from slocc.core.exact import ExactMatrix, format_scalar
from slocc.parsers.literal import parse_scalar


def matrix_to_literals(m: ExactMatrix) -> list[list[str]]:
    return [[format_scalar(v) for v in row] for row in m.to_rows()]


def literals_to_matrix(rows: Sequence[Sequence[str]]) -> ExactMatrix:
    if not rows:
        raise ValueError("matrix needs at least one row")
    return ExactMatrix.from_rows([[parse_scalar(v) for v in row] for row in rows])


def format_literals(cells: Sequence[Sequence[str]], indent: str = "  ") -> str:
    """Right-aligned columns, one row per line."""
    if not cells or not cells[0]:
        return f"{indent}[]"
    widths = [max(len(row[j]) for row in cells) for j in range(len(cells[0]))]
    return "\n".join(indent + "  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)


def format_matrix(m: ExactMatrix, indent: str = "  ") -> str:
    return format_literals(matrix_to_literals(m), indent)


def format_labeled(label: str, cells: Sequence[Sequence[str]]) -> str:
    cols = len(cells[0]) if cells else 0
    return f"{label} ({len(cells)}x{cols}):\n{format_literals(cells)}"
