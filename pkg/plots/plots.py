#!/usr/bin/env python3
"""Render figures from experiment CSV logs.

Four figure kinds, one per documented CSV contract (see docs/formats.md in
the main package):

  decay     weyl_coefficients.csv  -> largest Fourier modulus per walk length
  folner    folner_averages.csv    -> correlation averages vs box radius
  coverage  coverage.csv           -> found / not-found strip over targets
  spectrum  atom_masses.csv        -> stem plot of rational-point masses

The tool reads only those CSV columns, never the library that produced
them, and renders deterministically: fixed style, fixed dpi, no timestamps,
so identical input bytes give identical output bytes.

Usage:
  plots.py --kind decay --in weyl_coefficients.csv --out decay.png
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

KINDS = ("decay", "folner", "coverage", "spectrum")


class PlotError(Exception):
    pass


@dataclass(frozen=True)
class FigureJob:
    kind: str
    source: Path
    output: Path
    title: str | None = None


def read_rows(path: Path, required: tuple[str, ...]) -> list[dict]:
    if not path.exists():
        raise PlotError(f"input file {path} does not exist")
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in required if name not in header]
        if missing:
            raise PlotError(
                f"{path} is missing required columns: {', '.join(missing)}"
            )
        rows = list(reader)
    if not rows:
        raise PlotError(f"no data in {path}")
    return rows


def render(job: FigureJob) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        _RENDERERS[job.kind](job.source, ax)
        if job.title:
            ax.set_title(job.title)
        fig.tight_layout()
        job.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(job.output, format="png", metadata={"Software": "plots"})
        plt.close(fig)
    return job.output


def _render_decay(source: Path, ax) -> None:
    rows = read_rows(source, ("k", "modulus"))
    peaks: dict[int, float] = {}
    for row in rows:
        k = int(row["k"])
        peaks[k] = max(peaks.get(k, 0.0), float(row["modulus"]))
    ks = sorted(peaks)
    ax.semilogy(ks, [peaks[k] for k in ks], marker="o", color="#1f77b4")
    ax.set_xlabel("walk length k")
    ax.set_ylabel("max Fourier modulus")


def _render_folner(source: Path, ax) -> None:
    rows = read_rows(source, ("k", "q", "average"))
    series: dict[int, list[tuple[int, float]]] = {}
    for row in rows:
        series.setdefault(int(row["q"]), []).append(
            (int(row["k"]), float(row["average"]))
        )
    for q in sorted(series):
        points = sorted(series[q])
        ax.plot(
            [k for k, _ in points],
            [v for _, v in points],
            marker="o",
            label=f"stride {q}",
        )
    ax.set_xlabel("box radius k")
    ax.set_ylabel("correlation average")
    ax.legend()


def _render_coverage(source: Path, ax) -> None:
    rows = read_rows(source, ("t", "found"))
    data = sorted((int(row["t"]), row["found"] in ("1", "True", "true")) for row in rows)
    ts = [t for t, _ in data]
    colors = ["#2ca02c" if hit else "#d62728" for _, hit in data]
    ax.bar(ts, [1] * len(ts), width=1.0, color=colors, edgecolor="none")
    ax.set_xlabel("target t")
    ax.set_yticks([])
    ax.set_ylim(0, 1)
    found = sum(1 for _, hit in data if hit)
    ax.set_title(f"witnessed {found}/{len(data)} targets")


def _render_spectrum(source: Path, ax) -> None:
    rows = read_rows(source, ("x0", "modulus"))
    points = sorted(
        (float(Fraction(row["x0"])), float(row["modulus"])) for row in rows
    )
    xs = [x for x, _ in points]
    ys = [y for _, y in points]
    ax.stem(xs, ys, basefmt="k-")
    ax.set_xlabel("rational point")
    ax.set_ylabel("estimated mass")
    ax.set_xlim(-0.05, 1.05)


_RENDERERS = {
    "decay": _render_decay,
    "folner": _render_folner,
    "coverage": _render_coverage,
    "spectrum": _render_spectrum,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="source", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output", required=True, help="output PNG path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    job = FigureJob(
        kind=args.kind,
        source=Path(args.source),
        output=Path(args.output),
        title=args.title,
    )
    try:
        render(job)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
