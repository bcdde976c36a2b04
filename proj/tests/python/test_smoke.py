import math
import os
from pathlib import Path

import numpy as np
import pytest

import viewpath

SOURCE = Path(os.environ.get("VIEWPATH_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def test_ray_entropy_worked_example():
    assert abs(viewpath.ray_entropy([0.1, 0.1, 0.1, 0.9, 0.5]) - 0.975) < 1e-3
    assert abs(viewpath.ray_entropy([0.1, 0.1, 0.1, 0.5, 0.5, 0.5]) - 3.054) < 1e-3


def test_entropy_and_softmin():
    assert viewpath.voxel_entropy(0.5) == pytest.approx(math.log(2))
    d = np.array([0.4, 0.4, 0.4])
    assert viewpath.softmin_distance(d, 0.03, 0.05) == pytest.approx(0.35, abs=1e-12)
    assert viewpath.beta(0.0) == pytest.approx(0.044)
    assert viewpath.beta(0.14) == pytest.approx(0.0)


def test_coverage_boundary():
    ref = np.array([[0.25, 0.5, 0.125]])
    assert viewpath.coverage(ref + [0.008, 0, 0], ref) == 1.0
    assert viewpath.coverage(ref + [0.008 + 1e-9, 0, 0], ref) == 0.0


def test_hdi_and_rope():
    rng = np.random.default_rng(0)
    lo, hi = viewpath.hdi(rng.standard_normal(100000).tolist())
    assert abs(lo + 1.96) < 0.05 and abs(hi - 1.96) < 0.05
    assert viewpath.rope_decision((-0.005, 0.004), (-0.01, 0.01))[0] == "equivalent"
    kind, overlap = viewpath.rope_decision((-0.02, 0.02), (-0.01, 0.01))
    assert kind == "inconclusive" and overlap == pytest.approx(0.5)


def test_run_episode_is_deterministic():
    scenario = SOURCE / "tests" / "data" / "tiny_scenario.json"
    s1, csv1 = viewpath.run_episode(scenario, 2, "no_path")
    s2, csv2 = viewpath.run_episode(scenario, 2, "no_path")
    assert csv1 == csv2
    assert s1["strategy"] == "no_path" and s1["nbv_steps"] == 3
    with pytest.raises(ValueError):
        viewpath.run_episode(scenario, 0, "teleport")
