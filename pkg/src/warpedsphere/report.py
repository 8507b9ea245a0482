"""Machine-readable run reports.

One JSON document per run with schema
{run_id, config_hash, seed, timestamp, checks: [...], sequence?: {...}},
plus CSV flattenings of the check table and the convergence table.
Identical configuration and seed yield byte-identical reports except for
the timestamp field; file writes go through a temp file and rename.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from typing import Iterable, Optional

import numpy as np

from .verification import CheckResult, ConvergenceReport

#: significant digits used for every float written to CSV
CSV_DIGITS = 17

CSV_CHECK_COLUMNS = ("label", "lhs", "rhs", "margin", "tolerance", "verdict")

CSV_SEQUENCE_COLUMNS = ("index", "valid", "m", "volume", "volume_gap",
                        "diameter_lower", "diameter_upper", "admitted",
                        "error")


def _jsonable(obj):
    """Recursively convert dataclasses / numpy scalars to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v)
                for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON encoding of the configuration."""
    canon = json.dumps(_jsonable(config), sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def build_report(checks: Iterable[CheckResult], config: dict,
                 seed: Optional[int] = None,
                 sequence: Optional[ConvergenceReport] = None,
                 extras: Optional[dict] = None,
                 timestamp: Optional[str] = None) -> dict:
    """Assemble the report document; checks are sorted by label."""
    chash = config_hash(config)
    run_id = hashlib.sha256(
        f"{chash}:{seed}".encode()).hexdigest()[:16]
    doc = {
        "run_id": run_id,
        "config_hash": chash,
        "seed": seed,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
        "config": _jsonable(config),
        "checks": [_jsonable(c) for c in
                   sorted(checks, key=lambda c: c.label)],
    }
    if sequence is not None:
        seq = _jsonable(sequence)
        seq["spec"].pop("grid", None)
        doc["sequence"] = seq
    if extras:
        doc.update(_jsonable(extras))
    return doc


def report_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv_num(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), f".{CSV_DIGITS}g")
    return str(x)


def checks_csv(checks: Iterable[CheckResult]) -> str:
    """Flatten checks to CSV with columns CSV_CHECK_COLUMNS."""
    lines = [",".join(CSV_CHECK_COLUMNS)]
    for c in sorted(checks, key=lambda c: c.label):
        lines.append(",".join([c.label, _csv_num(c.lhs), _csv_num(c.rhs),
                               _csv_num(c.margin), _csv_num(c.tolerance),
                               c.verdict]))
    return "\n".join(lines) + "\n"


def sequence_csv(report: ConvergenceReport) -> str:
    """Flatten a convergence experiment to a plot-ready CSV table."""
    lines = [",".join(CSV_SEQUENCE_COLUMNS)]
    for e in report.entries:
        lines.append(",".join([
            str(e.index), _csv_num(e.valid), _csv_num(e.m),
            _csv_num(e.volume), _csv_num(e.volume_gap),
            _csv_num(e.diameter_lower), _csv_num(e.diameter_upper),
            _csv_num(e.admitted),
            e.error.replace(",", ";").replace("\n", " "),
        ]))
    return "\n".join(lines) + "\n"


def profile_csv(theta, u, du, ratio) -> str:
    """Plot-ready table of a potential solution."""
    lines = ["theta,u,du,ratio"]
    for row in zip(theta, u, du, ratio):
        lines.append(",".join(_csv_num(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partial report."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(path: str, doc: dict) -> None:
    write_text_atomic(path, report_json(doc))
