"""
CLI commands module.
All command handlers; each returns the list of files it wrote.
"""
import argparse
import logging
from pathlib import Path

import config
from channel_sim import BLER_COLUMNS, run_bler
from codec import DecoderSpec
from crc import CrcCode
from database import db_get_bler_history, db_save_bler_records, db_save_run, new_run_id
from errors import ConsistencyError, UsageError
from helpers import (
    check_code_size,
    check_parent_length,
    check_scheme,
    parse_float_list,
    parse_m_range,
)
from polar_core import level_count
from polar_spectra import spectrum_report
from puncturing import (
    count_equivalent_tables,
    derive_source_puncture_set,
    enumerate_equivalent_tables,
    qup_table,
    scheme_table,
    table_to_text,
)
from reliability import construct, reliability_for
from utils import (
    ensure_out_dir,
    format_rows,
    load_manifest,
    read_construction,
    sha256_file,
    write_construction,
    write_csv,
)

logger = logging.getLogger("rcpp-toolkit")


def _require(check: tuple) -> None:
    ok, error = check
    if not ok:
        raise UsageError(error)


def cmd_spectra(args: argparse.Namespace) -> list[Path]:
    """PS1/PS0 spectra and SD1/SD0/JSD for one scheme over one M or an M range."""
    _require(check_parent_length(args.n))
    _require(check_scheme(args.scheme))
    N, n = args.n, level_count(args.n)
    lengths, error = parse_m_range(args.m_range, N)
    if error:
        raise UsageError(error)
    if lengths is None:
        _require(check_code_size(N, args.m))
        lengths = [args.m]

    spectra_rows, distance_rows = [], []
    for M in lengths:
        table = scheme_table(args.scheme, N, N - M, args.mode)
        removed = set(derive_source_puncture_set(table).indices)
        surviving = [i for i in range(1, N + 1) if i not in removed]
        report = spectrum_report(surviving, n, None if args.direct else table.mode)
        for s in (report.ps1, report.ps0):
            spectra_rows.append([M, s.kind.value, *s.counts])
        d = report.distances
        distance_rows.append([M, d.sd1, d.sd0, d.jsd])
        logger.debug("Spectra: scheme=%s M=%s sd1=%.6f sd0=%.6f", args.scheme, M, d.sd1, d.sd0)

    out_dir = ensure_out_dir(args.out)
    tag = args.scheme.lower()
    header = ["M", "kind", *(f"w{w}" for w in range(n + 1))]
    return [
        write_csv(out_dir / f"spectra_{tag}.csv", header, spectra_rows),
        write_csv(out_dir / f"distances_{tag}.csv", ["M", "sd1", "sd0", "jsd"], distance_rows),
    ]


def cmd_construct(args: argparse.Namespace) -> list[Path]:
    """Construct a code and write its construction file, reliabilities and partition."""
    _require(check_code_size(args.n, args.m, args.k))
    _require(check_scheme(args.scheme))
    design, error = parse_float_list(args.ebn0)
    if error:
        raise UsageError(error)
    if len(design) != 1:
        raise UsageError("construct takes a single design Eb/N0")
    table = scheme_table(args.scheme, args.n, args.n - args.m, args.mode)
    cfg = construct(table, args.k, args.method, design[0], scheme=args.scheme.lower())
    r = reliability_for(cfg.table, cfg.rate, cfg.method, design[0], cfg.mode)

    out_dir = ensure_out_dir(args.out)
    partition = out_dir / "partition.txt"
    partition.write_text(cfg.partition_string() + "\n", encoding="utf-8")
    table_file = out_dir / "table.txt"
    table_file.write_text(table_to_text(cfg.table), encoding="utf-8")
    return [
        write_construction(out_dir / "construction.json", cfg),
        write_csv(out_dir / "reliability.csv", ["index", "value"], ((i + 1, float(v)) for i, v in enumerate(r.values))),
        partition,
        table_file,
    ]


def cmd_simulate(args: argparse.Namespace) -> list[Path]:
    """Monte-Carlo BLER sweep of a construction file; results also go to the ledger."""
    if not args.construction:
        raise UsageError("--construction is required")
    points, error = parse_float_list(args.ebn0)
    if error:
        raise UsageError(error)
    cfg = read_construction(Path(args.construction))
    crc = CrcCode(int(args.crc_poly, 16), args.crc_degree) if args.decoder == "ca-scl" else None
    decoder = DecoderSpec(args.decoder, args.list_size, crc, args.check_node or config.CHECK_NODE)
    records = run_bler(cfg, decoder, points, args.trials, args.max_errors, args.seed)

    out_dir = ensure_out_dir(args.out)
    path = write_csv(
        out_dir / "bler.csv",
        BLER_COLUMNS,
        ([r.as_row()[c] for c in BLER_COLUMNS] for r in records),
    )
    if not args.no_ledger:
        run_id = db_save_run("simulate", run_params(args), args.seed, new_run_id())
        if run_id is not None:
            db_save_bler_records(run_id, records)
    return [path]


def cmd_equiv(args: argparse.Namespace) -> list[Path]:
    """Size of the equivalence class of the QUP table, optionally enumerated."""
    _require(check_parent_length(args.n))
    count = count_equivalent_tables(args.n, args.q)
    shown = str(count.count) if count.count is not None else f"2^{count.exponent}"
    print(f"N={args.n} Q={args.q}: {shown} equivalent tables (exponent {count.exponent})")

    out_dir = ensure_out_dir(args.out)
    outputs = [
        write_csv(out_dir / "equiv.csv", ["N", "Q", "exponent", "count"], [[args.n, args.q, count.exponent, count.count if count.count is not None else ""]])
    ]
    if args.enumerate:
        reference = derive_source_puncture_set(qup_table(args.n, args.q))
        found = enumerate_equivalent_tables(args.n, args.q, reference)
        if count.count is not None and len(found) != count.count:
            logger.warning("Enumeration found %s tables, formula says %s", len(found), count.count)
        outputs.append(write_csv(out_dir / "equiv_sets.csv", ["punctured"], ([" ".join(map(str, s))] for s in found)))
    return outputs


def cmd_history(args: argparse.Namespace) -> list[Path]:
    """Print stored BLER points."""
    rows = db_get_bler_history(args.scheme, args.mode, args.n, args.m, args.k, args.limit)
    columns = ["run_id", "scheme", "mode", "n_parent", "m", "k", "decoder", "ebn0_db", "trials", "errors", "bler", "ci95", "seed"]
    print(format_rows(rows, columns))
    return []


def cmd_replay(args: argparse.Namespace) -> list[Path]:
    """Re-run a manifest into --out and compare every output byte for byte."""
    if not args.manifest:
        raise UsageError("--manifest is required")
    manifest = load_manifest(Path(args.manifest))
    command = manifest["command"]
    if command not in REPLAYABLE:
        raise UsageError(f"command {command!r} cannot be replayed")
    params = dict(manifest["params"])
    params["out"] = args.out or str(Path(args.manifest).parent / "replay")
    params["no_ledger"] = True
    outputs = COMMANDS[command](argparse.Namespace(**params))

    produced = {p.name: sha256_file(p) for p in outputs}
    mismatched = [o["path"] for o in manifest["outputs"] if produced.get(o["path"]) != o["sha256"]]
    if mismatched:
        raise ConsistencyError(f"replay differs in {', '.join(mismatched)}")
    print(f"Replay of {command} reproduced {len(produced)} file(s) exactly")
    return outputs


def run_params(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("handler", "params", "log_level")}


COMMANDS = {
    "spectra": cmd_spectra,
    "construct": cmd_construct,
    "simulate": cmd_simulate,
    "equiv": cmd_equiv,
    "history": cmd_history,
    "replay": cmd_replay,
}
REPLAYABLE = ("spectra", "construct", "simulate", "equiv")
