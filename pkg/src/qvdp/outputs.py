"""Versioned on-disk formats for simulation runs.

Every table is written twice, as CSV for plotting tools and as a JSON
mirror for programmatic use.  The CSV carries a schema comment on its
first line (`# qvdp-table v1 <kind>`) so downstream readers can refuse
files they do not understand.  A run directory additionally holds
manifest.json echoing the full configuration, library versions, wall
time, and convergence diagnostics; every number in the tables is
reproducible from the manifest alone.
"""
from __future__ import annotations

import csv
import json
import platform
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA = "qvdp-table v1"
MANIFEST_SCHEMA = "qvdp-manifest v1"

# canonical column order per table kind
TABLE_COLUMNS = {
    "wigner": ("re_alpha", "im_alpha", "w"),
    "radial": ("radius", "density"),
    "phase": ("angle", "density"),
    "phase_diff": ("angle", "density"),
    "populations": ("n", "p"),
    "branches": ("kappa2", "v", "branch", "r", "converged"),
    "boundary": ("model", "kappa2", "v_critical", "tolerance", "censored"),
    "trajectory": ("t", "re_alpha", "im_alpha"),
    "ode": ("t", "x", "dx_dt"),
    "ion_rates": ("quantity", "value_hz", "value_kappa1"),
}


@dataclass(frozen=True)
class Table:
    kind: str
    columns: dict


def _column_list(kind: str, columns: dict) -> list:
    try:
        order = TABLE_COLUMNS[kind]
    except KeyError:
        raise ValueError(f"unknown table kind {kind!r}") from None
    if set(columns) != set(order):
        raise ValueError(f"{kind} table needs columns {order}, got {tuple(columns)}")
    lengths = {len(columns[name]) for name in order}
    if len(lengths) != 1:
        raise ValueError("all columns must have the same length")
    return [columns[name] for name in order]


def _native(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return str(x)


def _cell(x):
    x = _native(x)
    return repr(x) if isinstance(x, float) else x  # full precision round-trip


def write_table(path, kind: str, columns: dict) -> None:
    """Write one table as CSV plus a JSON mirror next to it."""
    cols = _column_list(kind, columns)
    order = TABLE_COLUMNS[kind]
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {SCHEMA} {kind}\n")
        writer = csv.writer(fh)
        writer.writerow(order)
        for row in zip(*cols):
            writer.writerow([_cell(x) for x in row])

    mirror = {
        "schema": SCHEMA,
        "kind": kind,
        "columns": {
            name: [_native(x) for x in col] for name, col in zip(order, cols)
        },
    }
    path.with_suffix(".json").write_text(json.dumps(mirror, indent=1))


def read_table(path) -> Table:
    """Parse a CSV written by write_table; numeric columns come back as arrays."""
    path = Path(path)
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if not header.startswith(f"# {SCHEMA} "):
            raise ValueError(f"{path} is not a recognized table (header {header!r})")
        kind = header.split()[-1]
        rows = list(csv.reader(fh))
    names, data = rows[0], rows[1:]
    columns = {}
    for i, name in enumerate(names):
        raw = [row[i] for row in data]
        try:
            columns[name] = np.array([float(x) for x in raw])
        except ValueError:
            columns[name] = raw
    return Table(kind=kind, columns=columns)


def write_manifest(run_dir, manifest: dict) -> None:
    data = dict(manifest)
    data.setdefault("schema", MANIFEST_SCHEMA)
    Path(run_dir, "manifest.json").write_text(json.dumps(data, indent=1, sort_keys=True))


def read_manifest(run_dir) -> dict:
    data = json.loads(Path(run_dir, "manifest.json").read_text())
    if data.get("schema") != MANIFEST_SCHEMA:
        raise ValueError(f"unrecognized manifest schema {data.get('schema')!r}")
    return data


def build_manifest(scenario: str, config: dict, outputs, wall_time: float, diagnostics: dict) -> dict:
    import qvdp

    return {
        "schema": MANIFEST_SCHEMA,
        "scenario": scenario,
        "config": dict(config),
        "outputs": sorted(outputs),
        "wall_time_s": round(float(wall_time), 3),
        "diagnostics": dict(diagnostics),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": __import__("scipy").__version__,
            "qvdp": qvdp.__version__,
        },
    }


def new_run_dir(out_root, scenario: str, label: str | None = None) -> Path:
    """out/<scenario>/<label or timestamp>/, created fresh."""
    if label is None:
        label = time.strftime("%Y%m%d-%H%M%S")
    run_dir = Path(out_root) / scenario / label
    run_dir.mkdir(parents=True, exist_ok=True)
    return run_dir
