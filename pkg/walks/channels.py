"""
Discrete master equation for the decohering walk:

    rho(t+1) = (1 - p) U rho U^dag + p sum_i P_i U rho U^dag P_i

The projectors P_i act in the computational basis of the coin
(I (x) |a><a|), the position (|x><x| (x) I) or both (|x,a><x,a|).
Dephasing is applied after the unitary in every step.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional

import numpy as np
from numpy.typing import NDArray

from .exceptions import InvalidArgument, NumericalCorruption
from .lattice import (
    DEFAULT_COIN_INIT,
    CoinLabel,
    CoinOp,
    CoinSpec,
    Distribution,
    PureState,
    _check_capacity,
    apply_walk_operator,
    coin_state,
    hadamard,
    initial_state,
    lightcone_slice,
)

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-10
NEGATIVE_CLAMP = 1e-12
CORRUPTION_THRESHOLD = 1e-9


class ChannelKind(str, Enum):
    """Which register a decoherence event measures."""

    COIN_ONLY = "coin"
    POSITION_ONLY = "position"
    BOTH = "both"


@dataclass(frozen=True, eq=False)
class WalkConfig:
    """Run parameters shared by every engine."""

    T: int
    p: float = 0.0
    channel: ChannelKind = ChannelKind.BOTH
    coin: CoinOp = field(default_factory=hadamard)
    initial_coin: CoinSpec = DEFAULT_COIN_INIT

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 0:
            raise InvalidArgument(f"T must be a non-negative integer, got {self.T}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgument(f"p must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "T", int(self.T))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "channel", ChannelKind(self.channel))
        object.__setattr__(self, "initial_coin", coin_state(self.initial_coin))

    def with_changes(self, **changes) -> "WalkConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """rho over the flat joint index, dimension 2(2*horizon + 1)."""

    horizon: int
    entries: NDArray[np.complex128]
    time: int = 0

    def __post_init__(self):
        dim = 2 * (2 * self.horizon + 1)
        if self.entries.shape != (dim, dim):
            raise InvalidArgument(f"Density matrix has shape {self.entries.shape}, expected {(dim, dim)}")
        self.entries.setflags(write=False)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        psi = state.flat()
        return cls(horizon=state.horizon, entries=np.outer(psi, psi.conj()), time=state.time)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def blocks(self) -> NDArray[np.complex128]:
        """View indexed [x, a, y, b]."""
        sites = 2 * self.horizon + 1
        return self.entries.reshape(sites, 2, sites, 2)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())


# =====================================================
# DEPHASING
# =====================================================

def _kept_coherences(sites: int, channel: ChannelKind) -> NDArray[np.bool_]:
    """Boolean mask over [x, a, y, b] of entries that survive sum_i P_i rho P_i."""
    same_site = np.eye(sites, dtype=bool)[:, None, :, None]
    same_coin = np.eye(2, dtype=bool)[None, :, None, :]
    if channel is ChannelKind.BOTH:
        return same_site & same_coin
    if channel is ChannelKind.COIN_ONLY:
        return np.broadcast_to(same_coin, (sites, 2, sites, 2))
    return np.broadcast_to(same_site, (sites, 2, sites, 2))


def dephase(rho: DensityMatrix, channel: ChannelKind) -> DensityMatrix:
    """Non-selective projective measurement of the channel's register."""
    channel = ChannelKind(channel)
    blocks = rho.blocks()
    kept = _kept_coherences(blocks.shape[0], channel)
    entries = np.where(kept, blocks, 0).reshape(rho.entries.shape)
    return DensityMatrix(horizon=rho.horizon, entries=entries, time=rho.time)


def projectors(horizon: int, channel: ChannelKind) -> list[NDArray[np.float64]]:
    """Dense projector set {P_i} of a channel (oracle use only)."""
    channel = ChannelKind(channel)
    sites = 2 * horizon + 1
    dim = 2 * sites
    if channel is ChannelKind.BOTH:
        groups = [[i] for i in range(dim)]
    elif channel is ChannelKind.COIN_ONLY:
        groups = [[2 * s + label.index for s in range(sites)] for label in CoinLabel]
    else:
        groups = [[2 * s, 2 * s + 1] for s in range(sites)]

    result = []
    for members in groups:
        projector = np.zeros((dim, dim))
        projector[members, members] = 1.0
        result.append(projector)
    return result


# =====================================================
# MASTER EQUATION STEP
# =====================================================

def step_master(rho: DensityMatrix, config: WalkConfig) -> DensityMatrix:
    """
    rho' = (1 - p) U rho U^dag + p dephase(U rho U^dag).

    Only the lightcone block |x|, |y| <= t + 1 is touched; entries the
    channel keeps are copied untouched, so the trace is carried exactly.
    """
    _check_capacity(rho.horizon, rho.time)

    window = lightcone_slice(rho.horizon, rho.time)
    block = rho.blocks()[window, :, window, :]
    coin = config.coin.entries

    # U rho U^dag = (U (U rho)^dag)^dag on the [x, a, y, b] layout
    left = apply_walk_operator(block, coin)
    evolved = apply_walk_operator(left.transpose(2, 3, 0, 1).conj(), coin).transpose(2, 3, 0, 1).conj()

    if config.p > 0:
        kept = _kept_coherences(evolved.shape[0], config.channel)
        evolved = np.where(kept, evolved, (1.0 - config.p) * evolved)

    entries = np.zeros_like(rho.entries)
    sites = 2 * rho.horizon + 1
    entries.reshape(sites, 2, sites, 2)[window, :, window, :] = evolved
    return DensityMatrix(horizon=rho.horizon, entries=entries, time=rho.time + 1)


def master_history(config: WalkConfig, times: Optional[Iterable[int]] = None) -> Iterator[tuple[int, DensityMatrix]]:
    """
    Evolve once to the largest requested time, yielding (t, rho) at each
    requested t. Storage is sized for the largest time.
    """
    wanted = sorted(set(times)) if times is not None else [config.T]
    if not wanted or wanted[0] < 0:
        raise InvalidArgument(f"Requested times must be non-negative, got {wanted}")

    horizon = wanted[-1]
    rho = DensityMatrix.from_pure(initial_state(config.initial_coin, horizon))
    start_time = time.time()

    for t in range(horizon + 1):
        if t > 0:
            rho = step_master(rho, config)
        if t in wanted:
            drift = abs(rho.trace() - 1.0)
            if drift > TRACE_TOLERANCE:
                raise NumericalCorruption(f"Trace drifted by {drift:.3e} at t={t}")
            yield t, rho

    logger.info(
        f"Master evolution to T={horizon} (p={config.p}, channel={config.channel.value}, "
        f"dim={rho.dim}) in {time.time() - start_time:.3f}s"
    )


def evolve_master(config: WalkConfig) -> DensityMatrix:
    """T applications of step_master from the initial pure density matrix."""
    for _, rho in master_history(config):
        pass
    return rho


def diagonal_distribution(rho: DensityMatrix) -> Distribution:
    """
    P(x, a) = rho[(x,a),(x,a)], no renormalization. Roundoff negatives are
    clamped to zero; anything below -1e-9 is corruption.
    """
    diagonal = np.real(np.diag(rho.entries)).copy()
    lowest = diagonal.min()
    if lowest < -CORRUPTION_THRESHOLD:
        raise NumericalCorruption(f"Negative population {lowest:.3e} at t={rho.time}")
    if lowest < -NEGATIVE_CLAMP:
        logger.warning(f"Clamping negative population {lowest:.3e} at t={rho.time}")
    diagonal[diagonal < 0] = 0.0
    return Distribution(horizon=rho.horizon, probs=diagonal.reshape(-1, 2), time=rho.time)
