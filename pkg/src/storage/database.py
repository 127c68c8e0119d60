"""Run ledger: a SQLite record of decisions and experiments."""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import aiosqlite

from ..errors import InvalidInput

logger = logging.getLogger(__name__)

RUN_TABLES = {"decision": "decision_runs", "experiment": "experiment_runs"}
GROUP_COLUMNS = {
    "decision_runs": {"command", "d", "m", "phase_count", "does_pr"},
    "experiment_runs": {"study", "d", "m", "phase_count", "expectation_met"},
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Database:
    """SQLite database for decision and experiment runs."""

    def __init__(self, db_path: str = "./data/runs.db"):
        self.db_path = db_path

    async def initialize(self) -> None:
        """Initialize database tables."""
        if self.db_path != ":memory:":
            Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)
        async with aiosqlite.connect(self.db_path) as db:
            await db.execute("""
                CREATE TABLE IF NOT EXISTS decision_runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    command TEXT NOT NULL,
                    d INTEGER NOT NULL,
                    m INTEGER NOT NULL,
                    phase_count INTEGER NOT NULL,
                    does_pr INTEGER NOT NULL,
                    assignments_checked INTEGER NOT NULL,
                    elapsed_ms REAL NOT NULL,
                    timestamp TEXT NOT NULL,
                    metadata TEXT
                )
            """)

            await db.execute("""
                CREATE TABLE IF NOT EXISTS experiment_runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    study TEXT NOT NULL,
                    d INTEGER NOT NULL,
                    m INTEGER,
                    phase_count INTEGER NOT NULL,
                    trials INTEGER NOT NULL,
                    seed INTEGER NOT NULL,
                    pass_count INTEGER NOT NULL,
                    fail_count INTEGER NOT NULL,
                    mismatches INTEGER NOT NULL,
                    expectation_met INTEGER NOT NULL,
                    elapsed_ms REAL NOT NULL,
                    timestamp TEXT NOT NULL,
                    metadata TEXT
                )
            """)

            await db.commit()

    async def log_decision(
        self,
        command: str,
        d: int,
        m: int,
        phase_count: int,
        does_pr: bool,
        assignments_checked: int,
        elapsed_ms: float,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Record one decision."""
        async with aiosqlite.connect(self.db_path) as db:
            await db.execute(
                """
                INSERT INTO decision_runs
                (command, d, m, phase_count, does_pr, assignments_checked, elapsed_ms, timestamp, metadata)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    command,
                    d,
                    m,
                    phase_count,
                    int(does_pr),
                    assignments_checked,
                    elapsed_ms,
                    _now(),
                    json.dumps(metadata) if metadata else None,
                ),
            )
            await db.commit()

    async def log_experiment(
        self,
        study: str,
        d: int,
        m: Optional[int],
        phase_count: int,
        trials: int,
        seed: int,
        pass_count: int,
        fail_count: int,
        mismatches: int,
        expectation_met: bool,
        elapsed_ms: float,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Record one experiment."""
        async with aiosqlite.connect(self.db_path) as db:
            await db.execute(
                """
                INSERT INTO experiment_runs
                (study, d, m, phase_count, trials, seed, pass_count, fail_count, mismatches,
                 expectation_met, elapsed_ms, timestamp, metadata)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                (
                    study,
                    d,
                    m,
                    phase_count,
                    trials,
                    seed,
                    pass_count,
                    fail_count,
                    mismatches,
                    int(expectation_met),
                    elapsed_ms,
                    _now(),
                    json.dumps(metadata) if metadata else None,
                ),
            )
            await db.commit()

    async def get_runs(
        self,
        kind: str = "decision",
        limit: int = 20,
        start_date: Optional[str] = None,
        end_date: Optional[str] = None,
    ) -> List[Dict[str, Any]]:
        """Most recent runs of one kind, newest first."""
        table = self._table(kind)
        query = f"SELECT * FROM {table} WHERE 1=1"
        params: List[Any] = []

        if start_date:
            query += " AND timestamp >= ?"
            params.append(start_date)
        if end_date:
            query += " AND timestamp <= ?"
            params.append(end_date)

        query += " ORDER BY id DESC LIMIT ?"
        params.append(limit)

        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute(query, params) as cursor:
                rows = await cursor.fetchall()
        runs = []
        for row in rows:
            run = dict(row)
            if run.get("metadata"):
                run["metadata"] = json.loads(run["metadata"])
            runs.append(run)
        return runs

    async def get_aggregated_stats(
        self, kind: str = "decision", group_by: Optional[str] = None
    ) -> List[Dict[str, Any]]:
        """Run counts and timings grouped by a whitelisted column."""
        table = self._table(kind)
        group_by = group_by or ("command" if table == "decision_runs" else "study")
        if group_by not in GROUP_COLUMNS[table]:
            raise InvalidInput(
                f"cannot group {table} by {group_by!r}; choose from {sorted(GROUP_COLUMNS[table])}"
            )
        query = f"""
            SELECT
                {group_by},
                COUNT(*) as total_runs,
                AVG(elapsed_ms) as avg_elapsed_ms,
                MAX(timestamp) as last_run
            FROM {table}
            GROUP BY {group_by}
            ORDER BY total_runs DESC
        """

        async with aiosqlite.connect(self.db_path) as db:
            db.row_factory = aiosqlite.Row
            async with db.execute(query) as cursor:
                rows = await cursor.fetchall()
                return [dict(row) for row in rows]

    @staticmethod
    def _table(kind: str) -> str:
        try:
            return RUN_TABLES[kind]
        except KeyError:
            raise InvalidInput(f"unknown run kind {kind!r}; choose from {sorted(RUN_TABLES)}") from None
