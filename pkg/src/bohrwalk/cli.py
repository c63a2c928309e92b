"""Experiment driver: configuration, orchestration, and reproducible outputs.

Every stochastic run is a pure function of its resolved config (seeds are
mandatory), outputs are written atomically (temp file, then rename), and a
run record captures the config snapshot, library versions, wall clock, and
an output manifest.  Config files are JSON dictionaries keyed by flag name;
explicit command-line flags override file values.  Environment variables
are honored only for the output directory (BOHRWALK_OUTDIR) and the worker
count (BOHRWALK_WORKERS).

Exit codes: 0 success, 2 when a witness search exhausts its bounds without
finding one (not an error), 1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .bohr import (
    AMBIENT_INTEGERS,
    BohrSpec,
    ThickMask,
    bohr_document,
    enumerate_box,
    load_bohr_document,
)
from .conjsearch import charpoly_witness, discriminant_cover, find_conjugate_in_bohr
from .intmat import (
    IntPolynomial,
    TracelessIntMatrix,
    UnimodularMatrix,
    adjoint_matrix,
    char_poly,
    elementary_generators,
    proximal_element,
)
from .proximal import is_proximal
from .spectral import RotationSystem, atom_mass, folner_average
from .surd import parse_surd
from .torus import MERSENNE61, TorusPointQ, random_point
from .walk import (
    AtomicTorusMeasure,
    FiniteSupportMeasure,
    sample_walk,
    weyl_report,
)


class ConfigError(ValueError):
    """A config value is missing or malformed; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    subcommand: str
    params: dict
    out_dir: Path


@dataclass(frozen=True)
class RunRecord:
    subcommand: str
    params: dict
    versions: dict
    wall_clock_s: float
    outputs: list[str]
    summary: dict
    exit_code: int = 0

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "versions": self.versions,
            "wall_clock_s": self.wall_clock_s,
            "outputs": self.outputs,
            "summary": self.summary,
            "exit_code": self.exit_code,
        }


def _write_atomic(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def _write_json(path: Path, doc: object) -> None:
    _write_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _cell(v: object) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def _int_list(text: str) -> list[int]:
    return [int(part) for part in str(text).split(",") if part != ""]


def _fraction_list(text: str) -> list[Fraction]:
    return [Fraction(part) for part in str(text).split(",") if part != ""]


def _require(params: dict, field: str, caster: Callable, *, default=None):
    if field not in params or params[field] is None:
        if default is not None:
            return default
        raise ConfigError(f"field '{field}' is required")
    try:
        return caster(params[field])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"field '{field}': {exc}") from exc


def _positive_int(value) -> int:
    n = int(value)
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    return n


def _load_json_file(path_str: str) -> dict:
    path = Path(path_str)
    if not path.exists():
        raise ConfigError(f"file '{path}' does not exist")
    return json.loads(path.read_text())


def _load_matrix(path_str: str) -> TracelessIntMatrix:
    rows = _load_json_file(path_str)
    return TracelessIntMatrix.from_rows(rows)


def _load_measure(path_str: str) -> FiniteSupportMeasure:
    doc = _load_json_file(path_str)
    atoms = tuple(
        (UnimodularMatrix.from_rows(a["matrix"]), Fraction(a["weight"]))
        for a in doc["atoms"]
    )
    return FiniteSupportMeasure(atoms)


def _load_start(path_str: str) -> AtomicTorusMeasure:
    doc = _load_json_file(path_str)
    atoms = tuple(
        (TorusPointQ.from_json(a["point"]), Fraction(a["weight"]))
        for a in doc["atoms"]
    )
    return AtomicTorusMeasure(atoms)


def _load_bohr(path_str: str) -> tuple[BohrSpec, ThickMask | None]:
    return load_bohr_document(_load_json_file(path_str))


# ---------------------------------------------------------------------------
# subcommand runners: each returns (outputs, summary, exit_code)


def _run_proximal_check(params: dict, out_dir: Path):
    d = _require(params, "d", _positive_int)
    tol = _require(params, "tol", float, default=1e-9)
    if params.get("matrix"):
        g = UnimodularMatrix.from_rows(_load_json_file(params["matrix"]))
        if g.d != d:
            raise ConfigError(f"field 'matrix': size {g.d} does not match d={d}")
    else:
        g = proximal_element(d)
    report = is_proximal(g, tol)
    doc = {
        "d": d,
        "matrix": g.to_lists(),
        "char_poly": char_poly(adjoint_matrix(g)).to_list(),
        "moduli": list(report.moduli),
        "multiplicities": list(report.multiplicities),
        "top_gap": report.top_gap,
        "proximal": report.proximal,
    }
    path = out_dir / "spectrum_report.json"
    _write_json(path, doc)
    summary = {"proximal": report.proximal, "top_modulus": report.moduli[0]}
    return [path], summary, 0


def _run_walk_equidist(params: dict, out_dir: Path):
    d = _require(params, "d", _positive_int)
    k_list = _require(params, "k", _int_list)
    n_samples = _require(params, "samples", _positive_int)
    seed = _require(params, "seed", int)
    modulus = _require(params, "Q", int, default=MERSENNE61)
    sup_bound = _require(params, "H", _positive_int, default=3 if d == 2 else 1)
    workers = _require(params, "workers", _positive_int, default=_env_workers())
    if any(k < 0 for k in k_list):
        raise ConfigError("field 'k': walk lengths must be nonnegative")
    mu = (
        _load_measure(params["measure"])
        if params.get("measure")
        else FiniteSupportMeasure.uniform(elementary_generators(d))
    )
    if params.get("start"):
        start = _load_start(params["start"])
    else:
        start_seed = _require(params, "start_seed", int, default=seed + 1)
        start = AtomicTorusMeasure.delta(random_point(d, modulus, start_seed))

    rows = []
    max_by_k: dict[str, float] = {}
    argmax_by_k: dict[str, list[int]] = {}
    for k in k_list:
        cloud = sample_walk(mu, k, start, n_samples, seed, workers=workers)
        report = weyl_report(cloud, sup_bound)
        for h, coef in report.coefficients.items():
            rows.append((k, *h, coef.real, coef.imag, abs(coef)))
        max_by_k[str(k)] = report.max_modulus
        argmax_by_k[str(k)] = list(report.argmax)
    rank = d * d - 1
    header = ["k"] + [f"h{i+1}" for i in range(rank)] + ["re", "im", "modulus"]
    csv_path = out_dir / "weyl_coefficients.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "d": d,
        "Q": modulus,
        "samples": n_samples,
        "seed": seed,
        "H": sup_bound,
        "max_modulus": max_by_k,
        "argmax": argmax_by_k,
    }
    json_path = out_dir / "weyl_summary.json"
    _write_json(json_path, summary)
    return [csv_path, json_path], {"max_modulus": max_by_k}, 0


def _run_conjugacy_witness(params: dict, out_dir: Path):
    target = _load_matrix(_require(params, "target", str))
    spec, mask = _load_bohr(_require(params, "bohr", str))
    max_radius = _require(params, "L", _positive_int, default=12)
    entry_bound = _require(params, "entry_bound", _positive_int, default=10**12)
    workers = _require(params, "workers", _positive_int, default=_env_workers())
    result = find_conjugate_in_bohr(
        target, spec, mask, max_radius, entry_bound=entry_bound, workers=workers
    )
    return _emit_witness(result, max_radius, out_dir)


def _run_charpoly_witness(params: dict, out_dir: Path):
    spec, mask = _load_bohr(_require(params, "bohr", str))
    max_radius = _require(params, "L", _positive_int, default=12)
    workers = _require(params, "workers", _positive_int, default=_env_workers())
    if params.get("poly"):
        coeffs = _require(params, "poly", _int_list)
        query: IntPolynomial | TracelessIntMatrix = IntPolynomial(tuple(coeffs))
    elif params.get("target"):
        query = _load_matrix(params["target"])
    else:
        raise ConfigError("field 'poly' or 'target' is required")
    result = charpoly_witness(query, spec, mask, max_radius, workers=workers)
    return _emit_witness(result, max_radius, out_dir)


def _emit_witness(result, max_radius: int, out_dir: Path):
    path = out_dir / "witness.json"
    doc = {
        "found": result.found,
        "radius_searched": result.radius_searched,
        "tested": result.tested,
        "skipped_boundary": result.skipped_boundary,
        "skipped_entry_bound": result.skipped_entry_bound,
    }
    if result.found:
        doc["witness"] = result.witness.to_json()
    else:
        doc["note"] = f"no witness within word length {max_radius}; not a counterexample"
    _write_json(path, doc)
    code = 0 if result.found else 2
    return [path], {"found": result.found}, code


def _run_discriminant_cover(params: dict, out_dir: Path):
    if params.get("bohr"):
        spec, mask = _load_bohr(params["bohr"])
    else:
        alpha = _require(params, "alpha", parse_surd)
        eps = _require(params, "eps", Fraction)
        spec = BohrSpec(
            ambient=AMBIENT_INTEGERS,
            d=None,
            frequencies=((alpha,),),
            window=((Fraction(0), eps),),
        )
        mask = None
    box_radius = _require(params, "M", _positive_int, default=100_000)
    t_min = _require(params, "t_min", int, default=-50)
    t_max = _require(params, "t_max", int, default=50)
    x_bound = _require(params, "x_bound", _positive_int, default=5_000)
    if t_min > t_max:
        raise ConfigError("field 't_min': must not exceed t_max")
    report = discriminant_cover(
        spec, mask, box_radius, tuple(range(t_min, t_max + 1)), x_bound=x_bound
    )
    csv_path = out_dir / "coverage.csv"
    rows = [
        (e.t, e.found, "" if e.x is None else e.x, "" if e.y is None else e.y,
         "" if e.z is None else e.z, e.via)
        for e in report.entries
    ]
    _write_csv(csv_path, ["t", "found", "x", "y", "z", "via"], rows)
    summary = {
        "found_fraction": report.found_fraction,
        "members_found": report.members_found,
        "members_undecided": report.members_undecided,
        "box_radius": report.box_radius,
    }
    json_path = out_dir / "coverage_summary.json"
    _write_json(json_path, summary)
    return [csv_path, json_path], summary, 0


def _run_spectral_atoms(params: dict, out_dir: Path):
    spec, _ = _load_bohr(_require(params, "bohr", str))
    system = RotationSystem.from_bohr(spec)
    k_list = _require(params, "k", _int_list)
    q_list = _require(params, "q", _int_list, default=[1, 2, 3])
    atoms = _require(params, "atoms", _fraction_list, default=[])
    folner_rows = []
    for k in k_list:
        for q in q_list:
            folner_rows.append((k, q, folner_average(system, k, q)))
    folner_path = out_dir / "folner_averages.csv"
    _write_csv(folner_path, ["k", "q", "average"], folner_rows)
    atom_rows = []
    k_top = max(k_list)
    for x0 in atoms:
        value = atom_mass(system, x0, k_top)
        atom_rows.append((str(x0), value.real, abs(value)))
    atoms_path = out_dir / "atom_masses.csv"
    _write_csv(atoms_path, ["x0", "re", "modulus"], atom_rows)
    summary = {
        "volume_squared": float(system.window_volume) ** 2,
        "k": k_list,
        "q": q_list,
        "atoms": [str(a) for a in atoms],
    }
    json_path = out_dir / "spectral_summary.json"
    _write_json(json_path, summary)
    return [folner_path, atoms_path, json_path], summary, 0


def _run_bohr_enumerate(params: dict, out_dir: Path):
    spec, mask = _load_bohr(_require(params, "bohr", str))
    box_radius = _require(params, "M", _positive_int)
    result = enumerate_box(spec, box_radius, mask)
    from .bohr import as_coords, membership

    rows = []
    for member in result.members:
        coords = as_coords(spec, member)
        check = membership(spec, member, mask)
        margin = min(check.margins) if check.margins else 0.0
        rows.append((*coords, *check.tau, margin))
    rank = spec.rank
    header = (
        [f"h{i+1}" for i in range(rank)]
        + [f"tau{i+1}" for i in range(spec.n)]
        + ["margin"]
    )
    csv_path = out_dir / "members.csv"
    _write_csv(csv_path, header, rows)
    summary = {
        "members": len(result.members),
        "undecided": len(result.undecided),
        "scanned": result.scanned,
        "density": len(result.members) / result.scanned,
    }
    json_path = out_dir / "enumeration_summary.json"
    _write_json(json_path, summary)
    return [csv_path, json_path], summary, 0


_RUNNERS = {
    "proximal-check": _run_proximal_check,
    "walk-equidist": _run_walk_equidist,
    "conjugacy-witness": _run_conjugacy_witness,
    "charpoly-witness": _run_charpoly_witness,
    "discriminant-cover": _run_discriminant_cover,
    "spectral-atoms": _run_spectral_atoms,
    "bohr-enumerate": _run_bohr_enumerate,
}


def run(config: ExperimentConfig) -> RunRecord:
    """Execute one experiment and persist its outputs and run record."""
    if config.subcommand not in _RUNNERS:
        raise ConfigError(f"unknown subcommand '{config.subcommand}'")
    config.out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    outputs, summary, code = _RUNNERS[config.subcommand](config.params, config.out_dir)
    elapsed = time.perf_counter() - started
    record = RunRecord(
        subcommand=config.subcommand,
        params={k: v for k, v in config.params.items() if v is not None},
        versions={
            "bohrwalk": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        wall_clock_s=elapsed,
        outputs=[str(p.name) for p in outputs],
        summary=summary,
        exit_code=code,
    )
    _write_json(config.out_dir / "run_record.json", record.to_json())
    return record


def _env_workers() -> int:
    return int(os.environ.get("BOHRWALK_WORKERS", "1"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bohrwalk",
        description=(
            "Conjugation-orbit walks, window-set witness searches, and "
            "rotation-system diagnostics on the traceless integer lattice"
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, flags: list[tuple[str, dict]]):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON file with defaults for any flag")
        p.add_argument("--out-dir", default=None, help="output directory (env BOHRWALK_OUTDIR)")
        for flag, kwargs in flags:
            p.add_argument(flag, default=None, **kwargs)
        return p

    add("proximal-check", [
        ("--d", {"help": "matrix size"}),
        ("--matrix", {"help": "JSON array-of-rows file; defaults to the built-in proximal element"}),
        ("--tol", {"help": "relative gap tolerance (default 1e-9)"}),
    ])
    add("walk-equidist", [
        ("--d", {"help": "matrix size"}),
        ("--k", {"help": "comma-separated walk lengths, e.g. 5,10,20,40"}),
        ("--samples", {"help": "Monte Carlo sample count"}),
        ("--seed", {"help": "master seed (required for stochastic runs)"}),
        ("--H", {"help": "sup-norm frequency bound (default 3 for d=2, else 1)"}),
        ("--Q", {"help": "prime modulus (default 2^61-1)"}),
        ("--measure", {"help": "JSON measure file; defaults to uniform on transvections"}),
        ("--start", {"help": "JSON start measure file; defaults to a seeded random point"}),
        ("--start-seed", {"help": "seed for the default random start (default seed+1)"}),
        ("--workers", {"help": "shard count (env BOHRWALK_WORKERS)"}),
    ])
    add("conjugacy-witness", [
        ("--target", {"help": "JSON array-of-rows file, traceless"}),
        ("--bohr", {"help": "JSON window-set descriptor"}),
        ("--L", {"help": "maximum word length (default 12)"}),
        ("--entry-bound", {"help": "skip conjugates with larger entries (default 1e12)"}),
        ("--workers", {"help": "parallel membership scans"}),
    ])
    add("charpoly-witness", [
        ("--poly", {"help": "comma-separated integer coefficients, lowest degree first"}),
        ("--target", {"help": "JSON matrix file (alternative to --poly)"}),
        ("--bohr", {"help": "JSON window-set descriptor"}),
        ("--L", {"help": "maximum word length (default 12)"}),
        ("--workers", {"help": "parallel membership scans"}),
    ])
    add("discriminant-cover", [
        ("--alpha", {"help": "frequency, e.g. sqrt2"}),
        ("--eps", {"help": "window radius as an exact fraction or decimal, e.g. 0.1"}),
        ("--bohr", {"help": "JSON descriptor (alternative to --alpha/--eps)"}),
        ("--M", {"help": "member enumeration box radius (default 100000)"}),
        ("--t-min", {"help": "lowest target (default -50)"}),
        ("--t-max", {"help": "highest target (default 50)"}),
        ("--x-bound", {"help": "largest |x| tried as a divisor (default 5000)"}),
    ])
    add("spectral-atoms", [
        ("--bohr", {"help": "JSON descriptor; diagnostics run on its halved sub-window"}),
        ("--k", {"help": "comma-separated box radii, e.g. 500,1000,2000"}),
        ("--q", {"help": "comma-separated strides (default 1,2,3)"}),
        ("--atoms", {"help": "comma-separated rational points, e.g. 1/2,1/3,2/5"}),
    ])
    add("bohr-enumerate", [
        ("--bohr", {"help": "JSON descriptor"}),
        ("--M", {"help": "box radius"}),
    ])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    params = {
        k.replace("-", "_"): v
        for k, v in vars(args).items()
        if k not in ("subcommand", "config", "out_dir")
    }
    try:
        if args.config:
            file_values = _load_json_file(args.config)
            if not isinstance(file_values, dict):
                raise ConfigError("field 'config': expected a JSON object")
            for key, value in file_values.items():
                key = key.replace("-", "_")
                if params.get(key) is None:
                    params[key] = value
        out_dir = Path(
            args.out_dir
            or os.environ.get("BOHRWALK_OUTDIR")
            or "."
        )
        record = run(ExperimentConfig(args.subcommand, params, out_dir))
        print(json.dumps(record.summary, sort_keys=True))
        return record.exit_code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # module errors propagate with context
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
