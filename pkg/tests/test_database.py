import config
from channel_sim import BlerRecord
from database import db_get_bler_history, db_get_run, db_save_bler_records, db_save_run


def _record(scheme="qup", mode="C0", ebn0=1.0, errors=3):
    return BlerRecord(
        scheme=scheme, mode=mode, N=64, M=48, K=24, ebn0_db=ebn0,
        trials=100, errors=errors, bler=errors / 100, ci95=0.02, seed=5,
    )


def test_save_and_load_run(ledger):
    run_id = db_save_run("simulate", {"n": 64, "ebn0": "1,2"}, 5)
    assert run_id
    run = db_get_run(run_id)
    assert run["command"] == "simulate"
    assert run["params"] == {"n": 64, "ebn0": "1,2"}
    assert run["seed"] == 5
    assert run["version"] == config.VERSION
    assert db_get_run("missing") is None


def test_bler_history_filters_and_orders(ledger):
    run_id = db_save_run("simulate", {}, 5)
    written = db_save_bler_records(run_id, [_record(ebn0=1.0), _record(ebn0=2.0), _record("rqup", "C1", 1.0)])
    assert written == 3

    qup = db_get_bler_history(scheme="qup")
    assert [row["ebn0_db"] for row in qup] == [2.0, 1.0]
    assert qup[0]["decoder"] == "sc"
    assert qup[0]["n_parent"] == 64

    assert len(db_get_bler_history(mode="C1")) == 1
    assert len(db_get_bler_history(n_parent=64, m=48, k=24)) == 3
    assert len(db_get_bler_history(limit=1)) == 1


def test_unavailable_ledger_is_not_fatal(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "DB_PATH", str(tmp_path))
    assert db_save_run("equiv", {}, None) is None
    assert db_save_bler_records("x", [_record()]) == 0
    assert db_get_bler_history() == []
