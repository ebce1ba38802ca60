"""Fixture files produced by the solver CLI (the producer's public interface)."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

CONFIG = {
    "grid": {"N": 3, "r_max": 16.0, "count": 512, "spacing": "uniform"},
    "params": {"alpha": 2.0, "p": 2.0, "q": 1.5, "v0": 1.0, "s": 4.0},
    "solver": {"tol_residual": 1e-8, "max_iters": 400, "step0": 1.0,
               "multistarts": 1, "warm_start": True},
    "rng_seed": 0,
}


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "choquard.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def fixtures_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("producer")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps(CONFIG))
    _cli("fibering", "--config", str(cfg), "--seed-profile", "gaussian",
         "--t-min", "0", "--t-max", "50", "--samples", "600",
         "--out", str(root / "fiber.csv"))
    _cli("sweep", "--config", str(cfg), "--lambda-min", "0.05",
         "--lambda-max", "1.0", "--steps", "24", "--relative-to-lambda-n",
         "--out", str(root / "sweep.csv"))
    _cli("extremal", "--config", str(cfg), "--out", str(root / "extremal.json"))
    return root
