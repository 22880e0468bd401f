"""
Lattice conventions and exact pure-state evolution of the coined walk.

Conventions shared by every engine in this app:
- Coin order is (-1, +1); coin index 0 is the left mover, 1 the right mover
- Flat joint index i = 2 * (x + horizon) + coin_index
- Storage covers |x| <= horizon for the whole run; nothing grows
- One step is U = S . (C (x) I) with S|x,a> = |x+a,a>
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import IntEnum
from typing import TYPE_CHECKING, Iterator, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import CapacityExceeded, InvalidArgument

if TYPE_CHECKING:
    from .channels import WalkConfig

logger = logging.getLogger(__name__)

UNITARY_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-12

DEFAULT_COIN_INIT = "symmetric"


class CoinLabel(IntEnum):
    """Computational coin basis state: the direction the particle moves."""

    MINUS = -1
    PLUS = 1

    @property
    def index(self) -> int:
        return 0 if self is CoinLabel.MINUS else 1

    @classmethod
    def from_index(cls, index: int) -> "CoinLabel":
        return cls.MINUS if index == 0 else cls.PLUS

    @classmethod
    def parse(cls, value) -> "CoinLabel":
        """-1 or +1; anything else is an invalid argument."""
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidArgument(f"Coin label must be -1 or +1, got {value!r}") from None


CoinSpec = Union[CoinLabel, int, str, Sequence[complex], NDArray[np.complex128]]


@dataclass(frozen=True, eq=False)
class CoinOp:
    """
    2x2 unitary acting on the coin, rows and columns in coin order (-1, +1).
    """

    entries: NDArray[np.complex128]

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.shape != (2, 2):
            raise InvalidArgument(f"Coin operator must be 2x2, got shape {entries.shape}")
        deviation = np.abs(entries @ entries.conj().T - np.eye(2)).max()
        if deviation > UNITARY_TOLERANCE:
            raise InvalidArgument(f"Coin operator is not unitary (deviation {deviation:.2e})")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude field psi(x, a) with shape (2 * horizon + 1, 2)."""

    horizon: int
    amplitudes: NDArray[np.complex128]
    time: int = 0

    def __post_init__(self):
        expected = (2 * self.horizon + 1, 2)
        if self.amplitudes.shape != expected:
            raise InvalidArgument(
                f"Amplitudes have shape {self.amplitudes.shape}, expected {expected}"
            )
        self.amplitudes.setflags(write=False)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.horizon, self.horizon + 1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def flat(self) -> NDArray[np.complex128]:
        """Amplitudes in the flat joint index order."""
        return self.amplitudes.reshape(-1)


@dataclass(frozen=True, eq=False)
class Distribution:
    """
    Probability table P(x, a) at a fixed time.
    Normalization is checked by the consumers that depend on it (see analysis.moments).
    """

    horizon: int
    probs: NDArray[np.float64]
    time: int = 0

    def __post_init__(self):
        expected = (2 * self.horizon + 1, 2)
        if self.probs.shape != expected:
            raise InvalidArgument(f"Probabilities have shape {self.probs.shape}, expected {expected}")
        if np.any(self.probs < 0):
            raise InvalidArgument("Probabilities must be non-negative")
        self.probs.setflags(write=False)

    @classmethod
    def from_table(cls, table: dict, time: int = 0) -> "Distribution":
        """
        Build from {(x, a): prob} or {x: prob}; bare positions are put on coin +1.
        """
        keyed = {
            (key if isinstance(key, tuple) else (key, CoinLabel.PLUS)): value
            for key, value in table.items()
        }
        horizon = max([abs(int(x)) for x, _ in keyed] + [time])
        probs = np.zeros((2 * horizon + 1, 2))
        for (x, a), value in keyed.items():
            probs[int(x) + horizon, CoinLabel.parse(a).index] += value
        return cls(horizon=horizon, probs=probs, time=time)

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(-self.horizon, self.horizon + 1)

    def total(self) -> float:
        return float(self.probs.sum())

    def marginal(self) -> NDArray[np.float64]:
        """Position marginal, summed over the coin."""
        return self.probs.sum(axis=1)

    def prob(self, x: int, a: int) -> float:
        if abs(x) > self.horizon:
            return 0.0
        return float(self.probs[x + self.horizon, CoinLabel.parse(a).index])

    def support_rows(self) -> Iterator[tuple[int, CoinLabel, float]]:
        """(x, a, P) over the parity/lightcone support |x| <= t, x + t even."""
        for x in range(-self.time, self.time + 1, 2):
            for label in (CoinLabel.MINUS, CoinLabel.PLUS):
                yield x, label, self.prob(x, label)


# =====================================================
# COINS AND INITIAL STATES
# =====================================================

def hadamard() -> CoinOp:
    """(1/sqrt 2) [[1, 1], [1, -1]] in coin order (-1, +1)."""
    return CoinOp(np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0))


def coin_state(spec: CoinSpec) -> NDArray[np.complex128]:
    """
    Resolve a coin preparation into a normalized 2-vector (order -1, +1).

    Accepts `plus`, `minus`, `symmetric` ((|-1> + i|+1>)/sqrt 2),
    a CoinLabel / +-1, or an explicit unit-norm vector.
    """
    if isinstance(spec, str):
        named = {
            "plus": np.array([0.0, 1.0], dtype=np.complex128),
            "minus": np.array([1.0, 0.0], dtype=np.complex128),
            "symmetric": np.array([1.0, 1.0j], dtype=np.complex128) / np.sqrt(2.0),
        }
        if spec not in named:
            raise InvalidArgument(f"Unknown coin preparation '{spec}'")
        return named[spec]

    if isinstance(spec, (int, np.integer)) and not isinstance(spec, bool):
        vector = np.zeros(2, dtype=np.complex128)
        vector[CoinLabel.parse(spec).index] = 1.0
        return vector

    vector = np.asarray(spec, dtype=np.complex128).reshape(-1)
    if vector.shape != (2,):
        raise InvalidArgument(f"Coin state must have two amplitudes, got {vector.shape[0]}")
    if abs(np.linalg.norm(vector) - 1.0) > NORM_TOLERANCE:
        raise InvalidArgument(f"Coin state is not normalized (norm {np.linalg.norm(vector):.15f})")
    return vector.copy()


def initial_state(a0: CoinSpec, horizon: int) -> PureState:
    """Particle at the origin with coin a0, time 0."""
    if horizon < 0:
        raise InvalidArgument(f"Horizon must be >= 0, got {horizon}")
    amplitudes = np.zeros((2 * horizon + 1, 2), dtype=np.complex128)
    amplitudes[horizon] = coin_state(a0)
    return PureState(horizon=horizon, amplitudes=amplitudes, time=0)


# =====================================================
# STRUCTURED STEP (TWO NONZEROS PER ROW)
# =====================================================

def lightcone_slice(horizon: int, time: int) -> slice:
    """
    Site range |x| <= time + 1: everything a step starting at `time` can touch.
    """
    return slice(horizon - time - 1, horizon + time + 2)


def apply_walk_operator(block: NDArray[np.complex128], coin: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """
    U on the two leading (position, coin) axes of `block`; trailing axes ride along.

    The first and last sites of the block must be empty: the shift drops
    whatever would cross the block edge.
    """
    left, right = block[:, 0], block[:, 1]
    minus = coin[0, 0] * left + coin[0, 1] * right
    plus = coin[1, 0] * left + coin[1, 1] * right

    out = np.zeros_like(block)
    out[:-1, 0] = minus[1:]
    out[1:, 1] = plus[:-1]
    return out


def _check_capacity(horizon: int, time: int) -> None:
    if time >= horizon:
        raise CapacityExceeded(
            f"Step from t={time} would leave the stored lattice (horizon {horizon})"
        )


def step_pure(state: PureState, coin: CoinOp) -> PureState:
    """One application of U; norm is preserved to roundoff."""
    _check_capacity(state.horizon, state.time)

    window = lightcone_slice(state.horizon, state.time)
    amplitudes = np.zeros_like(state.amplitudes)
    amplitudes[window] = apply_walk_operator(state.amplitudes[window], coin.entries)
    return PureState(horizon=state.horizon, amplitudes=amplitudes, time=state.time + 1)


def pure_history(config: "WalkConfig") -> Iterator[PureState]:
    """Yield the ideal walk at t = 0, 1, ..., config.T."""
    state = initial_state(config.initial_coin, config.T)
    yield state
    for _ in range(config.T):
        state = step_pure(state, config.coin)
        yield state


def evolve_pure(config: "WalkConfig") -> PureState:
    """T unitary steps from the configured initial state."""
    if config.p != 0:
        raise InvalidArgument(
            f"evolve_pure needs p = 0 (got p={config.p}); use channels.evolve_master"
        )
    start_time = time.time()
    for state in pure_history(config):
        pass
    logger.debug(f"Pure walk T={config.T} evolved in {time.time() - start_time:.4f}s")
    return state


def distribution(state: PureState) -> Distribution:
    """Born-rule readout P(x, a) = |psi(x, a)|^2."""
    return Distribution(horizon=state.horizon, probs=np.abs(state.amplitudes) ** 2, time=state.time)


# =====================================================
# DENSE OPERATORS (BRUTE-FORCE ORACLES ONLY)
# =====================================================

def flat_index(x: int, a: int, horizon: int) -> int:
    return 2 * (x + horizon) + CoinLabel.parse(a).index


def walk_operator(horizon: int, coin: CoinOp) -> NDArray[np.complex128]:
    """
    Explicit U = S . (C (x) I) of dimension 2(2*horizon + 1).
    Columns whose image would leave the lattice are truncated.
    """
    dim = 2 * (2 * horizon + 1)
    unitary = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(-horizon, horizon + 1):
        for source in CoinLabel:
            column = flat_index(x, source, horizon)
            for target in CoinLabel:
                destination = x + int(target)
                if abs(destination) > horizon:
                    continue
                unitary[flat_index(destination, target, horizon), column] = (
                    coin.entries[target.index, source.index]
                )
    return unitary
