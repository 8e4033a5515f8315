"""Render the figure set from ifmsim CSV files, driven by a JSON manifest.

Each manifest entry names a builder, its input CSVs (by role), and the output
image. Inputs are validated (existence, required columns) before anything is
drawn, so a missing or malformed CSV produces one clean per-figure error
instead of a traceback. Rendering is a pure function of the CSV contents.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .recipes import BUILDERS

DPI = 150


@dataclass
class Table:
    """One parsed CSV: the embedded config plus named columns."""

    config: dict
    columns: list[str]
    data: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]


def load_table(path: Path) -> Table:
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing '# ' metadata header line")
    config = json.loads(lines[0][2:])
    if len(lines) < 2:
        raise ValueError(f"{path}: missing column header row")
    columns = lines[1].split(",")
    raw = [line.split(",") for line in lines[2:] if line]
    if not raw:
        raise ValueError(f"{path}: no data rows")
    if any(len(r) != len(columns) for r in raw):
        raise ValueError(f"{path}: ragged rows do not match the header")
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(columns):
        values = [r[j] for r in raw]
        try:
            cols[name] = np.array([float(v) if v != "" else np.nan for v in values])
        except ValueError:
            cols[name] = np.array(values, dtype=object)
    return Table(config, columns, cols)


def render_figure(entry: dict, data_dir: Path, output_dir: Path) -> Path:
    builder_name = entry["builder"]
    if builder_name not in BUILDERS:
        raise ValueError(f"unknown builder {builder_name!r}")
    builder, required = BUILDERS[builder_name]

    tables: dict[str, Table] = {}
    for role, filename in entry["inputs"].items():
        path = data_dir / filename
        if not path.exists():
            raise FileNotFoundError(f"missing input {path} (run `make data`)")
        table = load_table(path)
        need = required.get(role, set())
        missing = sorted(need - set(table.columns))
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        tables[role] = table

    fig = builder(tables)
    output_dir.mkdir(parents=True, exist_ok=True)
    out = output_dir / entry["output"]
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def run(manifest_path: Path, only: list[str] | None = None) -> int:
    manifest = json.loads(manifest_path.read_text())
    base = manifest_path.parent
    data_dir = (base / manifest["data_dir"]).resolve()
    output_dir = (base / manifest["output_dir"]).resolve()
    failed = 0
    for entry in manifest["figures"]:
        fig_id = entry["id"]
        if only and fig_id not in only:
            continue
        try:
            out = render_figure(entry, data_dir, output_dir)
        except Exception as exc:
            print(f"figure {fig_id}: {exc}", file=sys.stderr)
            failed += 1
        else:
            print(f"figure {fig_id}: wrote {out}")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ifmfigures", description="Regenerate figures from ifmsim CSV outputs."
    )
    parser.add_argument("--manifest", required=True, help="manifest JSON path")
    parser.add_argument(
        "--only", action="append", default=None, help="render only this figure id (repeatable)"
    )
    args = parser.parse_args(argv)
    return run(Path(args.manifest), args.only)


if __name__ == "__main__":
    sys.exit(main())
