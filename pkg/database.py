"""
Database operations module.
SQLite ledger of CLI runs and simulated BLER points.
"""
import json
import logging
import sqlite3
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

import config

logger = logging.getLogger("rcpp-toolkit")


def _db_connect() -> sqlite3.Connection:
    """Create database connection and ensure tables exist."""
    path = Path(config.DB_PATH)
    if path.parent and not path.parent.exists():
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
        except Exception:
            pass
    conn = sqlite3.connect(str(path))
    conn.row_factory = sqlite3.Row
    conn.execute(
        "CREATE TABLE IF NOT EXISTS runs (\n"
        "  run_id TEXT PRIMARY KEY,\n"
        "  command TEXT NOT NULL,\n"
        "  params_json TEXT NOT NULL,\n"
        "  seed INTEGER,\n"
        "  version TEXT NOT NULL,\n"
        "  created_at TEXT NOT NULL\n"
        ")"
    )
    conn.execute(
        "CREATE TABLE IF NOT EXISTS bler_points (\n"
        "  id INTEGER PRIMARY KEY AUTOINCREMENT,\n"
        "  run_id TEXT NOT NULL,\n"
        "  scheme TEXT NOT NULL,\n"
        "  mode TEXT NOT NULL,\n"
        "  n_parent INTEGER NOT NULL,\n"
        "  m INTEGER NOT NULL,\n"
        "  k INTEGER NOT NULL,\n"
        "  decoder TEXT NOT NULL DEFAULT 'sc',\n"
        "  ebn0_db REAL NOT NULL,\n"
        "  trials INTEGER NOT NULL,\n"
        "  errors INTEGER NOT NULL,\n"
        "  bler REAL NOT NULL,\n"
        "  ci95 REAL NOT NULL,\n"
        "  seed INTEGER NOT NULL,\n"
        "  FOREIGN KEY (run_id) REFERENCES runs(run_id)\n"
        ")"
    )
    return conn


def new_run_id() -> str:
    return uuid.uuid4().hex


def db_save_run(command: str, params: dict, seed: Optional[int], run_id: Optional[str] = None) -> Optional[str]:
    """Record one CLI run; returns its run_id or None when the ledger is unavailable."""
    run_id = run_id or new_run_id()
    try:
        conn = _db_connect()
        conn.execute(
            "INSERT INTO runs(run_id, command, params_json, seed, version, created_at) VALUES(?, ?, ?, ?, ?, ?)",
            (
                run_id,
                command,
                json.dumps(params, sort_keys=True, default=str),
                seed,
                config.VERSION,
                datetime.now(timezone.utc).isoformat(),
            ),
        )
        conn.commit()
        conn.close()
        logger.info("DB save run: run_id=%s command=%s seed=%s", run_id, command, seed)
        return run_id
    except Exception:
        logger.exception("DB write failed (save run): command=%s", command)
        return None


def db_save_bler_records(run_id: str, records: Iterable) -> int:
    """Append BLER records (channel_sim.BlerRecord) to a run; returns the count written."""
    rows = [
        (run_id, r.scheme, r.mode, r.N, r.M, r.K, r.decoder, r.ebn0_db, r.trials, r.errors, r.bler, r.ci95, r.seed)
        for r in records
    ]
    try:
        conn = _db_connect()
        conn.executemany(
            "INSERT INTO bler_points(run_id, scheme, mode, n_parent, m, k, decoder, ebn0_db, trials, errors, bler, ci95, seed)\n"
            "VALUES(?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            rows,
        )
        conn.commit()
        conn.close()
        logger.info("DB save BLER points: run_id=%s count=%s", run_id, len(rows))
        return len(rows)
    except Exception:
        logger.exception("DB write failed (save BLER points): run_id=%s", run_id)
        return 0


def db_get_bler_history(
    scheme: Optional[str] = None,
    mode: Optional[str] = None,
    n_parent: Optional[int] = None,
    m: Optional[int] = None,
    k: Optional[int] = None,
    limit: int = 100,
) -> list[dict]:
    """Latest BLER points, optionally filtered; newest first."""
    clauses, args = [], []
    for column, value in (("scheme", scheme), ("mode", mode), ("n_parent", n_parent), ("m", m), ("k", k)):
        if value is not None:
            clauses.append(f"{column}=?")
            args.append(value)
    where = f"WHERE {' AND '.join(clauses)}" if clauses else ""
    try:
        conn = _db_connect()
        cur = conn.execute(
            f"SELECT * FROM bler_points {where} ORDER BY id DESC LIMIT ?",
            (*args, limit),
        )
        rows = [dict(row) for row in cur.fetchall()]
        conn.close()
        return rows
    except Exception:
        logger.exception("DB read failed (BLER history)")
        return []


def db_get_run(run_id: str) -> Optional[dict]:
    try:
        conn = _db_connect()
        cur = conn.execute("SELECT * FROM runs WHERE run_id=?", (run_id,))
        row = cur.fetchone()
        conn.close()
        if not row:
            return None
        run = dict(row)
        run["params"] = json.loads(run.pop("params_json"))
        return run
    except Exception:
        logger.exception("DB read failed (get run): run_id=%s", run_id)
        return None
