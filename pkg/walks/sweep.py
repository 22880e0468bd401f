"""
Parameter sweeps over (channel, T, p).

Master-equation sweeps evolve once per (channel, p) and read every requested
T off the same history. Trajectory sweeps run one estimate per grid point
with a seed derived from the master seed and the point itself. Either way
each task is deterministic on its own, and rows are sorted by
(channel, T, p) at the end, so the output does not depend on `jobs`.
"""
from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Sequence

import numpy as np
from django.conf import settings

from .analysis import MomentsRecord, moments
from .channels import ChannelKind, WalkConfig, diagonal_distribution, master_history
from .exceptions import InvalidArgument
from .lattice import DEFAULT_COIN_INIT, CoinSpec
from .trajectories import SEED_MASK, TrajectoryConfig, estimate_distribution

logger = logging.getLogger(__name__)

CROSSOVER_T_VALUES = (20, 50, 100, 200, 300, 500)
CROSSOVER_P_COUNT = 25


def crossover_p_values() -> list[float]:
    """25 log-spaced p values from 1e-4 to 1."""
    return [float(p) for p in np.logspace(-4.0, 0.0, CROSSOVER_P_COUNT)]


@dataclass(frozen=True)
class SweepSpec:
    T_values: Sequence[int]
    p_values: Sequence[float]
    channels: Sequence[ChannelKind] = (ChannelKind.BOTH,)
    initial_coin: CoinSpec = DEFAULT_COIN_INIT
    engine: str = "master"
    n_runs: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not self.T_values or not self.p_values or not self.channels:
            raise InvalidArgument("Sweep grids must be non-empty")
        if any(T < 0 for T in self.T_values):
            raise InvalidArgument(f"T values must be >= 0, got {list(self.T_values)}")
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise InvalidArgument(f"p values must lie in [0, 1], got {list(self.p_values)}")
        if self.engine not in ("master", "trajectory"):
            raise InvalidArgument(f"Unknown engine '{self.engine}'")

    def grid_size(self) -> int:
        return len(set(self.T_values)) * len(set(self.p_values)) * len(set(self.channels))


def derive_point_seed(master_seed: int, channel: ChannelKind, T: int, p: float) -> int:
    """Stable 64-bit seed for one grid point."""
    digest = hashlib.sha256(f"{master_seed}:{ChannelKind(channel).value}:{T}:{p!r}".encode()).digest()
    return int.from_bytes(digest[:8], "little") & SEED_MASK


def _master_task(task: tuple) -> list[MomentsRecord]:
    channel, p, T_values, initial_coin = task
    config = WalkConfig(T=max(T_values), p=p, channel=channel, initial_coin=initial_coin)
    return [
        moments(diagonal_distribution(rho), p, channel)
        for _, rho in master_history(config, T_values)
    ]


def _trajectory_task(task: tuple) -> list[MomentsRecord]:
    channel, p, T, initial_coin, n_runs, seed, chunk_size = task
    walk = WalkConfig(T=T, p=p, channel=channel, initial_coin=initial_coin)
    estimate = estimate_distribution(
        TrajectoryConfig(walk=walk, n_runs=n_runs, seed=derive_point_seed(seed, channel, T, p)),
        chunk_size=chunk_size,
    )
    return [moments(estimate.probs, p, channel)]


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[MomentsRecord]:
    """One MomentsRecord per (channel, T, p), sorted by (channel, T, p)."""
    if jobs < 1:
        raise InvalidArgument(f"jobs must be >= 1, got {jobs}")

    T_values = sorted(set(int(T) for T in spec.T_values))
    p_values = sorted(set(float(p) for p in spec.p_values))
    channels = sorted(set(ChannelKind(c) for c in spec.channels), key=lambda c: c.value)

    if spec.engine == "master":
        worker = _master_task
        tasks = [(channel, p, T_values, spec.initial_coin) for channel in channels for p in p_values]
    else:
        worker = _trajectory_task
        chunk_size = settings.QWALK["TRAJECTORY_CHUNK_SIZE"]
        tasks = [
            (channel, p, T, spec.initial_coin, spec.n_runs, spec.seed, chunk_size)
            for channel in channels for p in p_values for T in T_values
        ]

    start_time = time.time()
    logger.info(f"Sweep: {spec.grid_size()} grid points, {len(tasks)} tasks, engine={spec.engine}, jobs={jobs}")

    if jobs == 1 or len(tasks) == 1:
        results = [worker(task) for task in tasks]
    else:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            results = pool.map(worker, tasks)

    records = [record for batch in results for record in batch]
    records.sort(key=lambda r: (r.channel, r.T, r.p))
    logger.info(f"Sweep finished: {len(records)} rows in {time.time() - start_time:.2f}s")
    return records
