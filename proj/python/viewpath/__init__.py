"""Python access to the viewpath simulation core."""

import json

from ._core import (
    beta,
    coverage,
    hdi,
    ray_entropy,
    rope_decision,
    softmin_distance,
    voxel_entropy,
)
from ._core import run_episode as _run_episode

__all__ = [
    "beta",
    "coverage",
    "hdi",
    "ray_entropy",
    "rope_decision",
    "run_episode",
    "softmin_distance",
    "voxel_entropy",
]


def run_episode(scenario, seed, strategy):
    """Run one episode and return (summary dict, episode CSV text)."""
    summary, csv = _run_episode(str(scenario), int(seed), strategy)
    return json.loads(summary), csv
