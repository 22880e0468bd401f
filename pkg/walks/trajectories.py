"""
Monte-Carlo unravelling of the master equation into pure-state trajectories.

After every unitary step a trajectory is, with probability p, measured in
the channel basis (coin, position or the joint basis), the outcome drawn by
the Born rule and the state renormalized. At T the joint (x, a) register is
read out once. Averaging many trajectories reproduces the diagonal of the
master-equation density matrix.

Seeding
-------
Run k of a batch with master seed s uses a Philox generator keyed by the
128-bit integer ``s | (k << 64)``. Any run can be replayed alone with
``run_trajectory(walk, derive_run_seed(s, k))``.

Stream layout per step: one uniform for "does an event occur" (skipped
entirely when p = 0), then one uniform for the measurement outcome when it
does. One final uniform selects the readout.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional, Sequence

import numpy as np
from django.conf import settings
from numpy.typing import NDArray

from .channels import ChannelKind, WalkConfig
from .exceptions import InvalidArgument
from .lattice import CoinLabel, Distribution, apply_walk_operator, lightcone_slice

logger = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class TrajectoryConfig:
    walk: WalkConfig
    n_runs: int
    seed: int = 0

    def __post_init__(self):
        if self.n_runs < 1:
            raise InvalidArgument(f"n_runs must be >= 1, got {self.n_runs}")
        if not 0 <= self.seed <= SEED_MASK:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class EstimatedDistribution:
    """Empirical frequencies with a binomial standard error per cell."""

    probs: Distribution
    standard_errors: NDArray[np.float64]
    n_runs: int

    def total_standard_error(self) -> float:
        return float(self.standard_errors.sum())


# =====================================================
# SEEDING
# =====================================================

def derive_run_seed(master_seed: int, run_index: int) -> int:
    """128-bit Philox key of run `run_index` under `master_seed`."""
    return (master_seed & SEED_MASK) | (run_index << 64)


def trajectory_generator(seed: int) -> np.random.Generator:
    if seed < 0:
        raise InvalidArgument(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


# =====================================================
# BATCHED TRAJECTORY KERNEL
# =====================================================

def _born_choice(weights: NDArray[np.float64], uniforms: NDArray[np.float64]) -> NDArray[np.int64]:
    """
    Column-wise inverse-CDF sampling: weights has shape (cells, runs).
    Zero-weight cells are never selected.
    """
    cumulative = np.cumsum(weights, axis=0)
    targets = uniforms * cumulative[-1]
    chosen = (cumulative <= targets[None, :]).sum(axis=0)
    return np.minimum(chosen, weights.shape[0] - 1)


def _collapse(psi: NDArray[np.complex128], runs: NDArray[np.int64],
              uniforms: NDArray[np.float64], channel: ChannelKind) -> None:
    """Projective measurement of `channel` on the selected runs, in place."""
    sub = psi[:, :, runs]
    populations = np.abs(sub) ** 2
    sites = sub.shape[0]
    columns = np.arange(len(runs))

    if channel is ChannelKind.BOTH:
        cells = _born_choice(populations.reshape(2 * sites, -1), uniforms)
        sub = np.zeros_like(sub)
        sub[cells // 2, cells % 2, columns] = 1.0
    elif channel is ChannelKind.COIN_ONLY:
        coins = _born_choice(populations.sum(axis=0), uniforms)
        keep = np.arange(2)[:, None] == coins[None, :]
        sub = sub * keep[None, :, :]
    else:
        sites_hit = _born_choice(populations.sum(axis=1), uniforms)
        keep = np.arange(sites)[:, None] == sites_hit[None, :]
        sub = sub * keep[:, None, :]

    norms = np.sqrt((np.abs(sub) ** 2).sum(axis=(0, 1)))
    psi[:, :, runs] = sub / norms[None, None, :]


def simulate_batch(walk: WalkConfig, run_seeds: Sequence[int]) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """
    Evolve one trajectory per seed side by side.
    Returns (positions, coin indices) of the final readouts.
    """
    generators = [trajectory_generator(seed) for seed in run_seeds]
    horizon = walk.T
    coin = walk.coin.entries

    # [x, a, run]
    psi = np.zeros((2 * horizon + 1, 2, len(generators)), dtype=np.complex128)
    psi[horizon] = walk.initial_coin[:, None]

    for t in range(horizon):
        window = lightcone_slice(horizon, t)
        psi[window] = apply_walk_operator(psi[window], coin)

        if walk.p > 0:
            hits = np.flatnonzero([generator.random() < walk.p for generator in generators])
            if hits.size:
                uniforms = np.array([generators[k].random() for k in hits])
                _collapse(psi, hits, uniforms, walk.channel)

    uniforms = np.array([generator.random() for generator in generators])
    populations = (np.abs(psi) ** 2).reshape(2 * (2 * horizon + 1), -1)
    cells = _born_choice(populations, uniforms)
    return cells // 2 - horizon, cells % 2


def run_trajectory(walk: WalkConfig, seed: int) -> tuple[int, CoinLabel]:
    """Single trajectory; deterministic in (walk, seed)."""
    positions, coins = simulate_batch(walk, [seed])
    return int(positions[0]), CoinLabel.from_index(int(coins[0]))


def _count_chunk(task: tuple[WalkConfig, int, int, int]) -> NDArray[np.int64]:
    walk, master_seed, start, stop = task
    seeds = [derive_run_seed(master_seed, k) for k in range(start, stop)]
    positions, coins = simulate_batch(walk, seeds)
    counts = np.zeros((2 * walk.T + 1, 2), dtype=np.int64)
    np.add.at(counts, (positions + walk.T, coins), 1)
    return counts


def estimate_distribution(config: TrajectoryConfig, jobs: int = 1,
                          chunk_size: Optional[int] = None) -> EstimatedDistribution:
    """
    Empirical distribution over n_runs trajectories.

    Runs are cut into fixed chunks (independent of `jobs`) and the integer
    counts are summed, so the result is bit-identical for any worker count.
    """
    if jobs < 1:
        raise InvalidArgument(f"jobs must be >= 1, got {jobs}")
    chunk_size = chunk_size or settings.QWALK["TRAJECTORY_CHUNK_SIZE"]
    tasks = [
        (config.walk, config.seed, start, min(start + chunk_size, config.n_runs))
        for start in range(0, config.n_runs, chunk_size)
    ]

    start_time = time.time()
    if jobs == 1 or len(tasks) == 1:
        partials = [_count_chunk(task) for task in tasks]
    else:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            partials = pool.map(_count_chunk, tasks)
    counts = np.sum(partials, axis=0)

    logger.info(
        f"{config.n_runs} trajectories (T={config.walk.T}, p={config.walk.p}, "
        f"channel={config.walk.channel.value}) in {time.time() - start_time:.3f}s "
        f"on {jobs} worker(s)"
    )

    probs = counts / config.n_runs
    standard_errors = np.sqrt(probs * (1.0 - probs) / config.n_runs)
    distribution = Distribution(horizon=config.walk.T, probs=probs, time=config.walk.T)
    return EstimatedDistribution(probs=distribution, standard_errors=standard_errors, n_runs=config.n_runs)
