"""
Closed-form predictions for the Hadamard walk and a numeric first-order
oracle for the noisy second moment.

- Ideal spread:   sigma(T)   = sqrt(1 - 1/sqrt2) (T - 1/T)
- Ideal drift:    <x>_a      = a (1 - 1/sqrt2) T
- Upper bound:    sigma(T,p) <= sigma(T) [1 - pT/(6 sqrt2) + (p/sqrt2)(1 - 1/sqrt2)]
- First order:    every way of having exactly one joint-basis decoherence
                  event, evaluated on exact ideal walks (no bounding steps)

sigma is always the deviation about the origin, sqrt(<x^2>).
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings
from django.core.cache import cache
from numpy.typing import NDArray

from .channels import WalkConfig
from .exceptions import InvalidArgument
from .lattice import DEFAULT_COIN_INIT, CoinLabel, CoinOp, CoinSpec, distribution, hadamard, pure_history

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SPREAD_COEFFICIENT = math.sqrt(1.0 - 1.0 / SQRT2)
DRIFT_COEFFICIENT = 1.0 - 1.0 / SQRT2
# Bracket of the upper bound: 1 - BOUND_PT * pT + BOUND_P * p
BOUND_PT = 1.0 / (6.0 * SQRT2)
BOUND_P = (1.0 / SQRT2) * (1.0 - 1.0 / SQRT2)
FIRST_ORDER_LIMIT = 0.2


@dataclass(frozen=True)
class TheoryPrediction:
    T: int
    p: float
    sigma_upper: float
    mean_a: float
    sigma_ideal: float
    in_regime: bool


def in_first_order_regime(T: int, p: float) -> bool:
    return p * T <= FIRST_ORDER_LIMIT


def asymptotic_sigma(T: int) -> float:
    """Ideal spread with its finite-T correction, sqrt(1 - 1/sqrt2)(T - 1/T)."""
    if T < 1:
        raise InvalidArgument(f"asymptotic_sigma needs T >= 1, got {T}")
    return SPREAD_COEFFICIENT * (T - 1.0 / T)


def asymptotic_mean(T: int, a: int) -> float:
    if T < 0:
        raise InvalidArgument(f"T must be >= 0, got {T}")
    return int(CoinLabel.parse(a)) * DRIFT_COEFFICIENT * T


def _check_bound_arguments(T: int, p: float) -> None:
    if T < 1 or p < 0:
        raise InvalidArgument(f"Bound needs T >= 1 and p >= 0, got T={T}, p={p}")
    if not in_first_order_regime(T, p):
        logger.warning(f"Bound evaluated outside the first-order regime (pT={p * T:.3f} > {FIRST_ORDER_LIMIT})")


def sigma_bound(T: int, p: float) -> float:
    """Upper bound on sigma(T, p) for decoherence on both registers."""
    _check_bound_arguments(T, p)
    return asymptotic_sigma(T) * (1.0 - BOUND_PT * p * T + BOUND_P * p)


def sigma2_bound(T: int, p: float) -> float:
    """The bound on sigma^2 before the square root is expanded."""
    _check_bound_arguments(T, p)
    return asymptotic_sigma(T) ** 2 * (1.0 - (SQRT2 / 6.0) * p * T + (SQRT2 - 1.0) * p)


def predict(T: int, p: float, a: int = CoinLabel.PLUS) -> TheoryPrediction:
    return TheoryPrediction(
        T=T,
        p=p,
        sigma_upper=sigma_bound(T, p),
        mean_a=asymptotic_mean(T, a),
        sigma_ideal=asymptotic_sigma(T),
        in_regime=in_first_order_regime(T, p),
    )


# =====================================================
# FIRST-ORDER ORACLE
# =====================================================

def basis_moment_history(T: int, coin: CoinOp, b: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    (<x>, <x^2>) at s = 0..T of the ideal walk started at |0, b>.
    Cached: every first-order evaluation with the same coin reuses them.
    """
    label = CoinLabel.parse(b)
    digest = hashlib.md5(f"{T}:{int(label)}:".encode() + coin.entries.tobytes()).hexdigest()
    cache_key = f"qwalk:basis-moments:{digest}"

    cached = cache.get(cache_key)
    if cached is not None:
        logger.debug(f"Moment history cache hit for T={T}, b={int(label)}")
        return cached

    means = np.zeros(T + 1)
    second = np.zeros(T + 1)
    config = WalkConfig(T=T, coin=coin, initial_coin=label)
    for state in pure_history(config):
        marginal = distribution(state).marginal()
        positions = state.positions
        means[state.time] = positions @ marginal
        second[state.time] = (positions ** 2) @ marginal

    result = (means, second)
    cache.set(cache_key, result, timeout=settings.QWALK["HISTORY_CACHE_TIMEOUT"])
    return result


def first_order_sigma2(T: int, p: float, initial_coin: CoinSpec = DEFAULT_COIN_INIT,
                       coin: Optional[CoinOp] = None) -> float:
    """
    sigma^2(T, p) kept to first order in p for joint-basis decoherence:

        (1 - pT) sigma^2(T) + p sum_t sum_{y,b} P(y,b,t) sum_{x,a} (x+y)^2 P_0b(x,a,T-t)

    The inner sum is <x^2>_0b + 2y <x>_0b + y^2 at T - t steps, using the
    translation identity P_yb(x,a,s) = P_0b(x-y,a,s). Exactly affine in p.
    """
    limit = settings.QWALK["MAX_FIRST_ORDER_T"]
    if not 0 <= T <= limit:
        raise InvalidArgument(f"first_order_sigma2 supports 0 <= T <= {limit}, got {T}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")

    coin = coin or hadamard()
    config = WalkConfig(T=T, coin=coin, initial_coin=initial_coin)
    basis = {label.index: basis_moment_history(T, coin, label) for label in CoinLabel}

    ideal_sigma2 = 0.0
    one_event = 0.0
    for state in pure_history(config):
        probs = distribution(state).probs
        positions = state.positions.astype(float)
        if state.time == T:
            ideal_sigma2 = float((positions ** 2) @ probs.sum(axis=1))
        if state.time == 0:
            continue
        remaining = T - state.time
        for index in (0, 1):
            means, second = basis[index]
            column = probs[:, index]
            one_event += float(
                column @ (second[remaining] + 2.0 * positions * means[remaining] + positions ** 2)
            )

    return ideal_sigma2 + p * (one_event - T * ideal_sigma2)
