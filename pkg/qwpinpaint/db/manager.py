"""
Run store for qwpinpaint.

Keeps inpainting runs, their per-iteration progress and named metrics in a
SQLite file so experiments can be compared after the fact.
"""

import hashlib
import json
import sqlite3
import uuid
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional


class RunDatabase:
    """SQLite-backed history of inpainting runs."""

    def __init__(self, db_path: Optional[Path] = None):
        """Initialize the run store.

        Args:
            db_path: Path to the SQLite file. Defaults to .qwp/runs.db in the current directory.
        """
        if db_path is None:
            db_path = Path.cwd() / '.qwp' / 'runs.db'

        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_schema()

    @contextmanager
    def _get_connection(self):
        conn = None
        try:
            conn = sqlite3.connect(self.db_path, timeout=30.0)
            conn.row_factory = sqlite3.Row
            yield conn
        except Exception:
            if conn:
                conn.rollback()
            raise
        finally:
            if conn:
                conn.close()

    def _init_schema(self):
        with self._get_connection() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_hash TEXT UNIQUE NOT NULL,
                    method TEXT NOT NULL,
                    input_path TEXT,
                    height INTEGER,
                    width INTEGER,
                    extended_size INTEGER,
                    config TEXT NOT NULL,
                    status TEXT NOT NULL DEFAULT 'running',
                    start_time TEXT NOT NULL,
                    end_time TEXT,
                    duration_seconds REAL,
                    iterations INTEGER,
                    final_lambda REAL,
                    psnr REAL,
                    ssim REAL,
                    error_message TEXT
                )
            """)

            conn.execute("""
                CREATE TABLE IF NOT EXISTS iterations (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_hash TEXT NOT NULL,
                    k INTEGER NOT NULL,
                    nu INTEGER NOT NULL,
                    lambda REAL NOT NULL,
                    delta REAL,
                    advanced INTEGER NOT NULL DEFAULT 0,
                    FOREIGN KEY (run_hash) REFERENCES runs (run_hash)
                )
            """)

            conn.execute("""
                CREATE TABLE IF NOT EXISTS metrics (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    run_hash TEXT NOT NULL,
                    metric_name TEXT NOT NULL,
                    metric_value REAL NOT NULL,
                    metric_unit TEXT,
                    recorded_at TEXT NOT NULL DEFAULT CURRENT_TIMESTAMP,
                    FOREIGN KEY (run_hash) REFERENCES runs (run_hash)
                )
            """)

            conn.execute("CREATE INDEX IF NOT EXISTS idx_runs_start_time ON runs (start_time)")
            conn.execute("CREATE INDEX IF NOT EXISTS idx_iterations_run ON iterations (run_hash)")
            conn.execute("CREATE INDEX IF NOT EXISTS idx_metrics_run ON metrics (run_hash)")
            conn.commit()

    def start_run(self, method: str, config: Dict[str, Any], input_path: Optional[str] = None,
                  shape: Optional[tuple] = None, extended_size: Optional[int] = None) -> str:
        """Register a new run and return its hash.

        Args:
            method: Inpainting method name
            config: Flat run configuration, stored as JSON
            input_path: Degraded input image, if read from a file
            shape: (height, width) of the input
            extended_size: Side of the padded square the transforms run on
        """
        timestamp = datetime.now().isoformat()
        hash_input = f"{timestamp}:{method}:{input_path}:{uuid.uuid4()}"
        run_hash = hashlib.sha256(hash_input.encode()).hexdigest()[:12]
        height, width = shape if shape is not None else (None, None)

        with self._get_connection() as conn:
            conn.execute("""
                INSERT INTO runs (
                    run_hash, method, input_path, height, width, extended_size,
                    config, status, start_time
                ) VALUES (?, ?, ?, ?, ?, ?, ?, 'running', ?)
            """, (run_hash, method, input_path, height, width, extended_size,
                  json.dumps(config, default=str), timestamp))
            conn.commit()

        return run_hash

    def record_iteration(self, run_hash: str, k: int, nu: int, lam: float, delta: float,
                         advanced: bool = False):
        with self._get_connection() as conn:
            conn.execute("""
                INSERT INTO iterations (run_hash, k, nu, lambda, delta, advanced)
                VALUES (?, ?, ?, ?, ?, ?)
            """, (run_hash, k, nu, lam, delta, int(advanced)))
            conn.commit()

    def record_metric(self, run_hash: str, metric_name: str, value: float, unit: Optional[str] = None):
        with self._get_connection() as conn:
            conn.execute("""
                INSERT INTO metrics (run_hash, metric_name, metric_value, metric_unit)
                VALUES (?, ?, ?, ?)
            """, (run_hash, metric_name, value, unit))
            conn.commit()

    def complete_run(self, run_hash: str, iterations: int, final_lambda: float,
                     psnr: Optional[float] = None, ssim: Optional[float] = None):
        """Mark a run as completed and store its outcome."""
        end_time = datetime.now()

        with self._get_connection() as conn:
            result = conn.execute(
                "SELECT start_time FROM runs WHERE run_hash = ?",
                (run_hash,)
            ).fetchone()
            if result is None:
                return

            duration = (end_time - datetime.fromisoformat(result['start_time'])).total_seconds()
            conn.execute("""
                UPDATE runs SET
                    end_time = ?, duration_seconds = ?, status = 'completed',
                    iterations = ?, final_lambda = ?, psnr = ?, ssim = ?
                WHERE run_hash = ?
            """, (end_time.isoformat(), duration, iterations, final_lambda, psnr, ssim, run_hash))
            conn.commit()

    def fail_run(self, run_hash: str, error_message: str):
        with self._get_connection() as conn:
            conn.execute("""
                UPDATE runs SET end_time = ?, status = 'failed', error_message = ?
                WHERE run_hash = ?
            """, (datetime.now().isoformat(), error_message, run_hash))
            conn.commit()

    def get_run(self, run_hash: str) -> Optional[Dict[str, Any]]:
        """Run row as a dict with its config decoded, or None if unknown."""
        with self._get_connection() as conn:
            result = conn.execute(
                "SELECT * FROM runs WHERE run_hash = ?",
                (run_hash,)
            ).fetchone()

        if result is None:
            return None
        run = dict(result)
        run['config'] = json.loads(run['config'])
        return run

    def list_runs(self, limit: int = 10) -> List[Dict[str, Any]]:
        """Most recent runs first."""
        with self._get_connection() as conn:
            results = conn.execute("""
                SELECT * FROM runs
                ORDER BY start_time DESC, id DESC
                LIMIT ?
            """, (limit,)).fetchall()

        runs = []
        for result in results:
            run = dict(result)
            run['config'] = json.loads(run['config'])
            runs.append(run)
        return runs

    def get_iterations(self, run_hash: str) -> List[Dict[str, Any]]:
        with self._get_connection() as conn:
            results = conn.execute("""
                SELECT k, nu, lambda, delta, advanced FROM iterations
                WHERE run_hash = ?
                ORDER BY k
            """, (run_hash,)).fetchall()
        return [dict(result) for result in results]

    def get_metrics(self, run_hash: str) -> List[Dict[str, Any]]:
        with self._get_connection() as conn:
            results = conn.execute("""
                SELECT metric_name, metric_value, metric_unit FROM metrics
                WHERE run_hash = ?
                ORDER BY id
            """, (run_hash,)).fetchall()
        return [dict(result) for result in results]
