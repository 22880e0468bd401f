"""
Moment extraction and the small-p fits built on top of the engines.

Fit protocols (fixed here because nothing upstream pins them down):
- Scaled slope: least-squares line through sigma(T, p) over a p grid that
  starts at 0 with every pT <= 0.2; the estimate is -slope / T^2.
- p coefficient: for each T the grid is p = f / T for f in P_FRACTIONS;
  sigma(T, p) / sigma(T, 0) - 1 is fitted by -c1 pT + c2 p + c3 (pT)^2 over
  all samples. The (pT)^2 column takes up the curvature of the ratio near
  pT = 0.2, which would otherwise leak into c1; c2 hardly moves with it.
  curvature=False gives the two-column fit. On the simulated walk c1 lands
  on 1/(6 sqrt2) and c2 comes out near 0.005, far under the bound's 0.2071.
- Finite-T coefficient: pure-walk sigma(T) fitted by k (T - 1/T).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Callable, Optional, Sequence

import numpy as np

from .channels import ChannelKind, WalkConfig, diagonal_distribution, evolve_master
from .exceptions import FitFailure, InvalidArgument, RegimeViolation
from .lattice import DEFAULT_COIN_INIT, CoinSpec, Distribution, distribution, pure_history
from .theory import FIRST_ORDER_LIMIT

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-8
P_FRACTIONS = (0.025, 0.05, 0.1, 0.2)

SigmaFunction = Callable[[int, float], float]


@dataclass(frozen=True)
class MomentsRecord:
    """Position moments about the origin; sigma = sqrt(second_moment)."""

    T: int
    p: float
    channel: str
    mean: float
    second_moment: float
    sigma: float


@dataclass(frozen=True)
class SlopeEstimate:
    T: int
    scaled_slope: float
    p_grid: list[float]
    method: str = "least-squares-affine"
    channel: str = ChannelKind.BOTH.value
    sigmas: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class BracketFit:
    """sigma(T,p)/sigma(T,0) ~ 1 - c1 pT + c2 p + c3 (pT)^2."""

    c1: float
    c2: float
    n_samples: int
    c3: float = 0.0


# =====================================================
# MOMENTS
# =====================================================

def _channel_label(channel) -> str:
    if channel is None:
        return "none"
    return ChannelKind(channel).value


def moments(dist: Distribution, p: float = 0.0, channel: Optional[ChannelKind] = None) -> MomentsRecord:
    """Mean and second moment of the position marginal."""
    total = dist.total()
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise InvalidArgument(f"Distribution is not normalized (total {total:.12f})")

    marginal = dist.marginal()
    positions = dist.positions.astype(float)
    mean = float(positions @ marginal)
    second_moment = float((positions ** 2) @ marginal)
    return MomentsRecord(
        T=dist.time,
        p=p,
        channel=_channel_label(channel),
        mean=mean,
        second_moment=second_moment,
        sigma=float(np.sqrt(max(second_moment, 0.0))),
    )


def centered_variance(dist: Distribution) -> float:
    """<x^2> - <x>^2; not the sigma used anywhere else in this app."""
    record = moments(dist)
    return record.second_moment - record.mean ** 2


def total_variation(first: Distribution, second: Distribution) -> float:
    """Half the L1 distance between two joint (x, a) tables."""
    horizon = max(first.horizon, second.horizon)

    def padded(dist: Distribution) -> np.ndarray:
        pad = horizon - dist.horizon
        return np.pad(dist.probs, ((pad, pad), (0, 0)))

    return 0.5 * float(np.abs(padded(first) - padded(second)).sum())


# =====================================================
# SIGMA EVALUATION
# =====================================================

def master_sigma(T: int, p: float, channel: ChannelKind = ChannelKind.BOTH,
                 initial_coin: CoinSpec = DEFAULT_COIN_INIT) -> float:
    """sigma(T, p) from the master equation."""
    config = WalkConfig(T=T, p=p, channel=channel, initial_coin=initial_coin)
    return moments(diagonal_distribution(evolve_master(config)), p, channel).sigma


def _master_sigma_task(args: tuple) -> float:
    return master_sigma(*args)


def _evaluate_sigmas(points: Sequence[tuple[int, float]], channel: ChannelKind,
                     initial_coin: CoinSpec, sigma_fn: Optional[SigmaFunction], jobs: int) -> list[float]:
    if sigma_fn is not None:
        return [float(sigma_fn(T, p)) for T, p in points]

    tasks = [(T, p, channel, initial_coin) for T, p in points]
    if jobs > 1 and len(tasks) > 1:
        with Pool(processes=min(jobs, len(tasks))) as pool:
            return pool.map(_master_sigma_task, tasks)
    return [_master_sigma_task(task) for task in tasks]


def _check_grid(T: int, p_grid: Sequence[float]) -> None:
    if len(p_grid) < 2:
        raise InvalidArgument(f"Slope needs at least 2 grid points, got {len(p_grid)}")
    if p_grid[0] != 0.0:
        raise InvalidArgument("Slope grid must start at p = 0")
    if any(b <= a for a, b in zip(p_grid, p_grid[1:])):
        raise InvalidArgument(f"Slope grid must be strictly increasing, got {list(p_grid)}")
    worst = max(p_grid) * T
    if worst > FIRST_ORDER_LIMIT:
        raise RegimeViolation(f"pT = {worst:.4f} exceeds the first-order limit {FIRST_ORDER_LIMIT} at T={T}")


def _least_squares(design: np.ndarray, targets: np.ndarray) -> np.ndarray:
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise FitFailure(f"Design matrix of shape {design.shape} is rank deficient")
    solution, *_ = np.linalg.lstsq(design, targets, rcond=None)
    return solution


# =====================================================
# FITS
# =====================================================

def scaled_small_p_slope(T: int, channel: ChannelKind, p_grid: Sequence[float],
                         initial_coin: CoinSpec = DEFAULT_COIN_INIT,
                         sigma_fn: Optional[SigmaFunction] = None, jobs: int = 1) -> SlopeEstimate:
    """-d sigma / dp scaled by T^-2, from an affine least-squares fit."""
    p_grid = [float(p) for p in p_grid]
    _check_grid(T, p_grid)
    channel = ChannelKind(channel)

    sigmas = _evaluate_sigmas([(T, p) for p in p_grid], channel, initial_coin, sigma_fn, jobs)
    design = np.column_stack([np.ones(len(p_grid)), p_grid])
    _, slope = _least_squares(design, np.array(sigmas))

    estimate = SlopeEstimate(
        T=T,
        scaled_slope=float(-slope / T ** 2),
        p_grid=p_grid,
        channel=channel.value,
        sigmas=[float(s) for s in sigmas],
    )
    logger.info(f"Scaled slope at T={T} ({channel.value}): {estimate.scaled_slope:.6f}")
    return estimate


def fit_bracket_coefficients(T_list: Sequence[int], channel: ChannelKind = ChannelKind.BOTH,
                             initial_coin: CoinSpec = DEFAULT_COIN_INIT,
                             sigma_fn: Optional[SigmaFunction] = None,
                             p_fractions: Sequence[float] = P_FRACTIONS, jobs: int = 1,
                             curvature: bool = True) -> BracketFit:
    """Joint fit of c1 (per decoherence event) and c2 (per unit p) over several T."""
    distinct = sorted(set(int(T) for T in T_list))
    if len(distinct) < 3:
        raise InvalidArgument(f"Coefficient fit needs at least 3 distinct T values, got {distinct}")
    if min(distinct) < 1:
        raise InvalidArgument("Coefficient fit needs T >= 1")
    if any(f <= 0 for f in p_fractions):
        raise InvalidArgument(f"p fractions must be positive, got {list(p_fractions)}")
    if max(p_fractions) > FIRST_ORDER_LIMIT:
        raise RegimeViolation(f"pT = {max(p_fractions)} exceeds the first-order limit {FIRST_ORDER_LIMIT}")

    points = [(T, 0.0) for T in distinct]
    points += [(T, f / T) for T in distinct for f in p_fractions]
    sigmas = dict(zip(points, _evaluate_sigmas(points, ChannelKind(channel), initial_coin, sigma_fn, jobs)))

    rows, targets = [], []
    for T, p in points:
        if p == 0.0:
            continue
        rows.append([-p * T, p, (p * T) ** 2] if curvature else [-p * T, p])
        targets.append(sigmas[(T, p)] / sigmas[(T, 0.0)] - 1.0)

    c1, c2, *rest = _least_squares(np.array(rows), np.array(targets))
    c3 = float(rest[0]) if curvature else 0.0
    logger.info(f"Bracket fit over T={distinct}: c1={c1:.6f}, c2={c2:.6f}, c3={c3:.6f}")
    return BracketFit(c1=float(c1), c2=float(c2), n_samples=len(rows), c3=c3)


def p_coefficient_fit(T_list: Sequence[int], channel: ChannelKind = ChannelKind.BOTH, **kwargs) -> float:
    """c2, the coefficient of the p-only term."""
    return fit_bracket_coefficients(T_list, channel, **kwargs).c2


def sigma_coefficient_fit(T_list: Sequence[int], initial_coin: CoinSpec = DEFAULT_COIN_INIT) -> float:
    """k in sigma(T) ~ k (T - 1/T) for the ideal walk, from one evolution to max(T_list)."""
    wanted = sorted(set(int(T) for T in T_list))
    if not wanted or wanted[0] < 1:
        raise InvalidArgument(f"Finite-T fit needs T values >= 1, got {wanted}")

    sigmas = {}
    for state in pure_history(WalkConfig(T=wanted[-1], initial_coin=initial_coin)):
        if state.time in wanted:
            sigmas[state.time] = moments(distribution(state)).sigma

    corrections = np.array([[T - 1.0 / T] for T in wanted])
    (k,) = _least_squares(corrections, np.array([sigmas[T] for T in wanted]))
    return float(k)
