"""Secondary acceptance: render every figure kind from real CLI outputs.

The fixture runs the equidistribution, spectral, and coverage experiments
through the installed command-line interface at their acceptance-suite
parameters, then each figure kind is rendered twice from the resulting
CSVs and compared byte for byte.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import pytest

PLOTS = Path(__file__).resolve().parents[1] / "plots.py"

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "bohrwalk.cli", *args], capture_output=True, text=True
    )


@pytest.fixture(scope="session")
def experiment_outputs(tmp_path_factory):
    base = tmp_path_factory.mktemp("runs")
    walk_dir = base / "walk"
    result = cli(
        "walk-equidist", "--d", "2", "--k", "5,10,20,40", "--samples", "100000",
        "--seed", "42", "--start-seed", "101", "--H", "3", "--out-dir", str(walk_dir),
    )
    assert result.returncode == 0, result.stderr

    spectral_dir = base / "spectral"
    bohr = base / "zline.json"
    bohr.write_text(json.dumps({
        "ambient": "integers",
        "d": None,
        "frequencies": [["sqrt2"]],
        "window": [{"center": "0", "radius": "1/4"}],
        "mask": [],
    }))
    result = cli(
        "spectral-atoms", "--bohr", str(bohr), "--k", "500,1000,2000",
        "--q", "1,2,3", "--atoms", "1/2,1/3,2/5", "--out-dir", str(spectral_dir),
    )
    assert result.returncode == 0, result.stderr

    cover_dir = base / "coverage"
    result = cli(
        "discriminant-cover", "--alpha", "sqrt2", "--eps", "0.1", "--M", "100000",
        "--t-min", "-50", "--t-max", "50", "--out-dir", str(cover_dir),
    )
    assert result.returncode == 0, result.stderr

    return {
        "decay": walk_dir / "weyl_coefficients.csv",
        "folner": spectral_dir / "folner_averages.csv",
        "spectrum": spectral_dir / "atom_masses.csv",
        "coverage": cover_dir / "coverage.csv",
    }


def test_criterion_9_renders_all_kinds_deterministically(experiment_outputs, tmp_path):
    started = time.perf_counter()
    for kind, source in experiment_outputs.items():
        assert source.exists(), f"{kind} input missing"
        first = tmp_path / f"{kind}_a.png"
        second = tmp_path / f"{kind}_b.png"
        for out in (first, second):
            result = subprocess.run(
                [sys.executable, str(PLOTS), "--kind", kind,
                 "--in", str(source), "--out", str(out)],
                capture_output=True, text=True,
            )
            assert result.returncode == 0, f"{kind}: {result.stderr}"
            assert out.read_bytes()[:8] == PNG_MAGIC
        assert first.read_bytes() == second.read_bytes(), f"{kind} not deterministic"
    elapsed = time.perf_counter() - started
    print(f"\nACCEPTANCE 9: PASS (all four figure kinds byte-identical across runs; {elapsed:.1f}s)")
