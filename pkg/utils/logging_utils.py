import json
import logging
import os
import sqlite3
from datetime import datetime
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

RUN_COLUMNS = {
    "timestamp": "TEXT",
    "command": "TEXT",
    "program": "TEXT",
    "mode": "TEXT",
    "engine": "TEXT",
    "answer_sets": "INTEGER",
    "compatible_sets": "INTEGER",
    "ufs_searches_run": "INTEGER",
    "ufs_searches_skipped": "INTEGER",
    "search_node_expansions": "INTEGER",
    "total_ms": "REAL",
    "status": "TEXT",
    "stats_json": "TEXT",
}


def get_db_path():
    """
    Get the database path from the environment variable or use the default.

    Returns:
        str: The database path
    """
    return os.environ.get("HEXUFS_DB_PATH", "hexufs_runs.db")


def init_db():
    """
    Initialize the SQLite run log.
    Creates the table solver_runs if it doesn't exist and adds missing columns.
    """
    try:
        conn = sqlite3.connect(get_db_path())
        cursor = conn.cursor()

        cursor.execute("SELECT name FROM sqlite_master WHERE type='table' AND name='solver_runs'")
        table_exists = cursor.fetchone() is not None

        if not table_exists:
            columns = ", ".join(f"{name} {kind}" for name, kind in RUN_COLUMNS.items())
            cursor.execute(f"CREATE TABLE solver_runs (id INTEGER PRIMARY KEY AUTOINCREMENT, {columns})")
        else:
            # Older logs may lack newer columns
            cursor.execute("PRAGMA table_info(solver_runs)")
            present = {column[1] for column in cursor.fetchall()}
            for name, kind in RUN_COLUMNS.items():
                if name not in present:
                    cursor.execute(f"ALTER TABLE solver_runs ADD COLUMN {name} {kind}")

        conn.commit()
        conn.close()
        logger.info("Run log database initialized successfully")
    except Exception as e:
        logger.error(f"Error initializing run log database: {e}")


def log_run(
    command: str,
    program: str,
    stats: Optional[Dict[str, Any]] = None,
    status: str = "ok",
    total_ms: Optional[float] = None,
):
    """
    Record one evaluator run in the SQLite run log. Never raises.

    Args:
        command: The command or endpoint ("solve", "analyze", ...)
        program: Program text (or path) the run was about
        stats: Flat evaluation statistics, if the run produced any
        status: "ok" or an error description
        total_ms: Wall-clock time of the run
    """
    stats = stats or {}
    try:
        init_db()
        timestamp = datetime.now().isoformat()
        conn = sqlite3.connect(get_db_path())
        cursor = conn.cursor()
        cursor.execute(
            "INSERT INTO solver_runs (timestamp, command, program, mode, engine, answer_sets, compatible_sets, "
            "ufs_searches_run, ufs_searches_skipped, search_node_expansions, total_ms, status, stats_json) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            (
                timestamp, command, program, stats.get("mode"), stats.get("engine"),
                stats.get("answer_sets"), stats.get("compatible_sets"), stats.get("ufs_searches_run"),
                stats.get("ufs_searches_skipped"), stats.get("search_node_expansions"),
                total_ms, status, json.dumps(stats) if stats else None,
            ),
        )
        conn.commit()
        conn.close()
        logger.info(f"Logged {command} run at {timestamp} with status={status}")
    except Exception as e:
        logger.error(f"Error logging run: {e}")
