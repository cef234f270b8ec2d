"""
Utility functions: CSV / manifest writers, construction files and formatting.
"""
import csv
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

import config
from errors import ConsistencyError, ShapeError
from puncturing import Mode, PuncturingTable
from reliability import CodeConfig

logger = logging.getLogger("rcpp-toolkit")

MANIFEST_SUFFIX = ".manifest.json"


def ensure_out_dir(out: Optional[str]) -> Path:
    path = Path(out or config.OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write rows with a fixed header; floats keep full repr precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    logger.info("Wrote %s", path)
    return path


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: Path, command: str, params: dict, seed: Optional[int], outputs: Sequence[Path]
) -> Path:
    """Write <command>.manifest.json next to the outputs it describes."""
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "version": config.VERSION,
        "csv_schema": config.CSV_SCHEMA_VERSION,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "outputs": [{"path": p.name, "sha256": sha256_file(p)} for p in outputs],
    }
    path = out_dir / f"{command}{MANIFEST_SUFFIX}"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    logger.info("Wrote manifest %s", path)
    return path


def load_manifest(path: Path) -> dict:
    try:
        manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ShapeError(f"cannot read manifest {path}: {e}") from e
    for key in ("command", "params", "outputs"):
        if key not in manifest:
            raise ShapeError(f"manifest {path} lacks {key!r}")
    return manifest


def config_to_dict(cfg: CodeConfig) -> dict:
    return {
        "scheme": cfg.scheme,
        "mode": cfg.mode.value,
        "N": cfg.N,
        "M": cfg.M,
        "K": cfg.K,
        "method": cfg.method,
        "design_ebn0_db": cfg.design_ebn0_db,
        "table": "".join(str(b) for b in cfg.table.table),
        "partition": cfg.partition_string(),
    }


def config_from_dict(data: dict) -> CodeConfig:
    """Rebuild a CodeConfig from a construction file, checking it against itself."""
    mode = Mode.parse(data["mode"])
    table = PuncturingTable(tuple(int(c) for c in data["table"]), mode)
    partition = data["partition"]
    if len(partition) != table.N:
        raise ShapeError(f"partition has {len(partition)} entries, table has {table.N}")
    info = tuple(i + 1 for i, c in enumerate(partition) if c == "A")
    punctured = tuple(i + 1 for i, c in enumerate(partition) if c == "P")
    if len(info) != int(data["K"]) or table.M != int(data["M"]):
        raise ConsistencyError("construction file K / M disagree with its table and partition")
    return CodeConfig(
        table=table,
        mode=mode,
        K=len(info),
        info=info,
        punctured_source=punctured,
        scheme=data.get("scheme"),
        method=data.get("method", "ga"),
        design_ebn0_db=data.get("design_ebn0_db"),
    )


def write_construction(path: Path, cfg: CodeConfig) -> Path:
    path.write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote construction %s", path)
    return path


def read_construction(path: Path) -> CodeConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ShapeError(f"cannot read construction file {path}: {e}") from e
    return config_from_dict(data)


def format_rows(rows: Sequence[dict], columns: Sequence[str]) -> str:
    """Plain fixed-width table for terminal output."""
    if not rows:
        return "(no rows)"
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in columns]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(columns, widths)))
    return "\n".join(lines)
