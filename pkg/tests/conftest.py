"""Shared builders for the test suite."""

import math

import numpy as np
import pytest

from udnsync.config import SimConfig
from udnsync.topology import Topology


def grid_topology(k: int, spacing: float = 14.0, jitter: float = 3.0,
                  rng: np.random.Generator | None = None,
                  triplets=()) -> Topology:
    """Jittered square grid: bounded distance ratios, fast consensus mixing."""
    side = math.ceil(math.sqrt(k))
    pts = [[i * spacing, j * spacing]
           for i in range(side) for j in range(side)][:k]
    positions = np.array(pts, dtype=float)
    if rng is not None and jitter > 0:
        positions = positions + rng.uniform(-jitter, jitter, size=(k, 2))
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    return Topology(positions=positions, distance_matrix=dist,
                    triplets=tuple(triplets))


def small_config(**overrides) -> SimConfig:
    base = dict(num_nodes=9, num_subbands=2, max_iters=200, max_snapshots=2,
                noise_density_dbm_hz=-114.0)
    base.update(overrides)
    cfg = SimConfig(**base)
    cfg.validate()
    return cfg


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
