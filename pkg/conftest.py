import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import config  # noqa: E402


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    """Point the SQLite ledger at a throwaway file."""
    path = tmp_path / "ledger.db"
    monkeypatch.setattr(config, "DB_PATH", str(path))
    return path


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    path.mkdir()
    return path
