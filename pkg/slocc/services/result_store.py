import aiosqlite
from pathlib import Path
from typing import Optional

from slocc.config import get_settings
from slocc.models.responses import ClassifyReport


SCHEMA = """
-- Cached classify reports, keyed by the canonical state digest
CREATE TABLE IF NOT EXISTS reports (
    digest TEXT PRIMARY KEY,
    source TEXT NOT NULL,
    shape TEXT NOT NULL,
    signature TEXT NOT NULL,
    report_json TEXT NOT NULL,
    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
);
CREATE INDEX IF NOT EXISTS idx_reports_signature ON reports(signature);
"""


class ResultStore:
    def __init__(self, db_path: Optional[Path] = None):
        settings = get_settings()
        self.db_path = db_path or settings.store_path
        self.db_path.parent.mkdir(parents=True, exist_ok=True)

    async def initialize(self):
        """Initialize database schema."""
        async with aiosqlite.connect(self.db_path) as db:
            await db.executescript(SCHEMA)
            await db.commit()

    async def get_report(self, digest: str) -> Optional[ClassifyReport]:
        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute(
                "SELECT report_json FROM reports WHERE digest = ?",
                (digest,)
            ) as cursor:
                row = await cursor.fetchone()
                return ClassifyReport.model_validate_json(row["report_json"]) if row else None

    async def save_report(self, digest: str, report: ClassifyReport) -> None:
        async with aiosqlite.connect(self.db_path) as db:
            await db.execute(
                """INSERT OR REPLACE INTO reports (digest, source, shape, signature, report_json)
                   VALUES (?, ?, ?, ?, ?)""",
                (digest, report.source, "x".join(map(str, report.shape)), report.signature,
                 report.model_dump_json())
            )
            await db.commit()

