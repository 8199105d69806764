"""Run-report persistence to JSON and CSV files.

points.csv columns, in order::

    probe,point,theta_rad,signal_db,noise_db,snr_db,delta_theta_rad,enhancement_db,stderr

``probe`` is ``coherent`` or ``entangled``; every other column is a float
written with ``repr`` (``nan`` marks fields a scenario does not produce).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from pathlib import Path

from .dsp import write_spectrum_csv
from .scenarios import CSV_COLUMNS, PointRecord, RunReport


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def report_dict(report: RunReport, wall_clock: bool = True) -> dict:
    d = {
        "scenario": report.scenario,
        "version": report.version,
        "config": report.config,
        "records": [asdict(r) for r in report.records],
        "min_resolvable": report.min_resolvable,
        "checks": report.checks,
        "notes": report.notes,
    }
    if wall_clock:
        d["wall_clock_s"] = report.wall_clock_s
    return _clean(d)


def points_csv_text(records: list[PointRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.probe] + [repr(float(getattr(r, c))) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def read_points_csv(path) -> list[PointRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: header does not match {','.join(CSV_COLUMNS)}")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"{path}:{n}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        if row[0] not in ("coherent", "entangled"):
            raise ValueError(f"{path}:{n}: unknown probe {row[0]!r}")
        out.append(PointRecord(row[0], *(float(v) for v in row[1:])))
    return out


def emit_outputs(report: RunReport, out_dir, spectra: bool | None = None) -> list[Path]:
    """Write report.json and points.csv, plus spectrum_<i>.csv when spectra are kept."""
    out = Path(out_dir)
    write_spectra = bool(report.spectra) if spectra is None else spectra
    payload = {
        "report.json": json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n",
        "points.csv": points_csv_text(report.records),
    }
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, text in payload.items():
            p = out / name
            p.write_text(text)
            written.append(p)
        if write_spectra:
            for i, (_, _, sp) in enumerate(report.spectra):
                written.append(write_spectrum_csv(sp, out / f"spectrum_{i}.csv"))
    except OSError as exc:
        raise OSError(f"cannot write outputs under {out}: {exc}") from exc
    return written
