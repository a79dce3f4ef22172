"""Parallel parameter sweeps: independent runs, deterministic aggregation.

Each cross-product point owns its run directory; workers are separate
processes (bounded by the configured degree / environment variable); the
aggregate table is written once, in lexicographic point order, after every
task has finished — so the table bytes never depend on completion order or
on how many workers ran.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import SweepSpec, load_config
from .runner import run_experiment

__all__ = ["SweepTable", "sweep", "SWEEP_COLUMNS"]

SWEEP_COLUMNS = (
    "index",
    "b",
    "amplitude",
    "offset",
    "margin_energy",
    "margin_kinetic",
    "verdict",
    "fitted_constant",
    "max_boundary_mass",
    "status",
    "error",
)


@dataclass
class SweepTable:
    rows: list[dict]
    path: Path


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _run_point(payload) -> dict:
    """Executed in a worker process; must stay importable at module top level."""
    index, b, amplitude, offset, config_text = payload
    row = {
        "index": index,
        "b": b,
        "amplitude": amplitude,
        "offset": offset,
        "margin_energy": "",
        "margin_kinetic": "",
        "verdict": "",
        "fitted_constant": "",
        "max_boundary_mass": "",
        "status": "",
        "error": "",
    }
    try:
        cfg = load_config(config_text)
        art = run_experiment(cfg)
        _, me = art.trajectory.series("threshold_energy_margin")
        _, mk = art.trajectory.series("threshold_kinetic_margin")
        _, bv = art.trajectory.series("boundary_mass")
        row["margin_energy"] = float(me[0]) if me.size else ""
        row["margin_kinetic"] = float(mk[0]) if mk.size else ""
        row["verdict"] = art.verdict
        row["fitted_constant"] = (
            float(art.morawetz[-1].fitted_constant) if art.morawetz else ""
        )
        row["max_boundary_mass"] = float(max(bv)) if bv.size else 0.0
        row["status"] = art.status
    except Exception as exc:  # per-row failure: record, keep sweeping
        row["verdict"] = "error"
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep(spec: SweepSpec) -> SweepTable:
    spec.validate()
    points = spec.points()
    payloads = []
    for index, (b, lam, x0) in enumerate(points):
        cfg = spec.config_for(b, lam, x0)
        offset = math.sqrt(sum(c * c for c in x0))
        payloads.append((index, b, lam, offset, cfg.to_text()))

    workers = spec.resolved_workers()
    rows: list[dict | None] = [None] * len(payloads)
    if workers == 1 and len(payloads) == 1:
        rows[0] = _run_point(payloads[0])
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
            for row in pool.map(_run_point, payloads):
                rows[row["index"]] = row

    base_dir = Path(spec.base.output_dir)
    base_dir.mkdir(parents=True, exist_ok=True)
    table_path = base_dir / "sweep.csv"
    with open(table_path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in SWEEP_COLUMNS])
    return SweepTable(rows=rows, path=table_path)
