from pathlib import Path

from slocc.core.exact import ExactMatrix
from slocc.errors import ParseError
from slocc.parsers.base import BaseParser
from slocc.parsers.literal import parse_scalar


class MatrixParser(BaseParser[list[ExactMatrix]]):
    """Whitespace-separated literal rows; blank lines separate matrices, ``#`` starts a comment."""

    suffixes = ("mat", "matrix", "txt")

    def parse_text(self, text: str, source: str = "") -> list[ExactMatrix]:
        blocks: list[list[list[str]]] = [[]]
        offset = 0
        positions: list[list[int]] = [[]]
        for line in text.splitlines(keepends=True):
            content = line.split("#", 1)[0]
            if content.strip():
                blocks[-1].append(content.split())
                positions[-1].append(offset)
            elif blocks[-1]:
                blocks.append([])
                positions.append([])
            offset += len(line)
        if not blocks[-1]:
            blocks.pop()
            positions.pop()
        if not blocks:
            raise ParseError(f"{source or 'matrix'}: no matrix rows found")
        return [self._build(rows, starts, source) for rows, starts in zip(blocks, positions)]

    def parse_pair(self, file_path: Path) -> tuple[ExactMatrix, ExactMatrix]:
        matrices = self.parse(file_path)
        if len(matrices) != 2:
            raise ParseError(f"{file_path.name}: expected two matrices separated by a blank line, "
                             f"found {len(matrices)}")
        return matrices[0], matrices[1]

    @staticmethod
    def _build(rows: list[list[str]], starts: list[int], source: str) -> ExactMatrix:
        width = len(rows[0])
        for row, start in zip(rows, starts):
            if len(row) != width:
                raise ParseError(f"{source or 'matrix'}: ragged row with {len(row)} entries, expected {width}",
                                 start)
        return ExactMatrix.from_rows([[parse_scalar(v, start) for v in row] for row, start in zip(rows, starts)])
