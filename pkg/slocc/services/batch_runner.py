import asyncio
import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Optional

from slocc.models.responses import BatchItem, BatchSummary, ItemStatus
from slocc.services.classifier import ClassifierService


logger = logging.getLogger(__name__)

INDEX_NAME = "index.json"


def write_atomic(path: Path, text: str) -> None:
    """Write through a temporary sibling file and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class BatchRunner:
    """
    Classifies every state file of a directory with a pool of asyncio workers.
    Items are independent; a failing item is recorded and never aborts the batch.
    """

    def __init__(
        self,
        service: Optional[ClassifierService] = None,
        output_dir: Optional[Path] = None,
        workers: Optional[int] = None
    ):
        self.service = service or ClassifierService()
        settings = self.service.settings
        self.output_dir = output_dir or settings.reports_path
        self.workers = workers or settings.batch_workers

    def collect(self, input_dir: Path) -> list[Path]:
        files = [
            p for p in sorted(input_dir.iterdir())
            if p.is_file() and self.service.is_supported(p.suffix.lstrip("."))
        ]
        logger.info(f"Batch: {len(files)} state files in {input_dir}")
        return files

    async def run(self, input_dir: Path) -> BatchSummary:
        started = time.monotonic()
        files = self.collect(input_dir)
        queue: asyncio.Queue[tuple[int, Path]] = asyncio.Queue()
        for position, path in enumerate(files):
            queue.put_nowait((position, path))
        results: list[Optional[BatchItem]] = [None] * len(files)

        async def worker():
            while True:
                try:
                    position, path = queue.get_nowait()
                except asyncio.QueueEmpty:
                    return
                try:
                    results[position] = await self._process(path)
                finally:
                    queue.task_done()

        await asyncio.gather(*(worker() for _ in range(max(1, min(self.workers, len(files) or 1)))))

        items = [item for item in results if item is not None]
        summary = BatchSummary(
            items=items,
            count=len(items),
            completed=sum(1 for i in items if i.status == ItemStatus.COMPLETED),
            cached=sum(1 for i in items if i.status == ItemStatus.CACHED),
            failed=sum(1 for i in items if i.status == ItemStatus.FAILED),
            elapsed_ms=(time.monotonic() - started) * 1000,
        )
        write_atomic(self.output_dir / INDEX_NAME, summary.model_dump_json(indent=2))
        logger.info(f"Batch finished: {summary.completed} classified, {summary.cached} cached, "
                    f"{summary.failed} failed")
        return summary

    async def _process(self, path: Path) -> BatchItem:
        try:
            report, digest, hit = await self.service.classify_cached(path)
            report_path = self.output_dir / f"{path.stem}.report.json"
            write_atomic(report_path, report.model_dump_json(indent=2))
            return BatchItem(
                source=path.name,
                status=ItemStatus.CACHED if hit else ItemStatus.COMPLETED,
                digest=digest,
                signature=report.signature,
                report_path=str(report_path),
            )
        except Exception as e:
            logger.error(f"Failed to classify {path.name}: {e}")
            return BatchItem(source=path.name, status=ItemStatus.FAILED, error_message=str(e))
