"""Fock-diagonal density operators and their evolution in a thermal channel.

States are photon-number mixtures rho = sum_l p_l |l><l|.  This family is
closed under the damped-oscillator master equation with a thermal bath, whose
diagonal part is the birth-death rate system

    dp_l/d(gamma*t) = (n+1) [(l+1) p_{l+1} - l p_l] + n [l p_{l-1} - (l+1) p_l].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TOL = 1e-12
MAX_TAIL_TOL = 1e-6

# Evolved populations this close to zero from below are clamped (and counted);
# anything more negative is treated as a solver failure.
CLAMP_THRESHOLD = 1e-12

_MAX_ENLARGE_ATTEMPTS = 8


@dataclass(frozen=True)
class ChannelParams:
    """Thermal dissipative channel.

    Parameters
    ----------
    n : float
        Mean thermal photon number of the bath; ``n = 0`` is the pure
        photon-loss channel.
    gamma_t : float
        Dimensionless decay time (dissipation rate times elapsed time).
    """

    n: float
    gamma_t: float

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n >= 0.0):
            raise ValueError(f"channel n must be finite and >= 0, got {self.n}")
        if not (math.isfinite(self.gamma_t) and self.gamma_t >= 0.0):
            raise ValueError(f"gamma_t must be finite and >= 0, got {self.gamma_t}")


@dataclass(frozen=True)
class FockDiagonalState:
    """Photon-number-diagonal state: ``weights[l]`` is the population of |l>.

    The retained weights account for all but ``tail_tol`` of the unit mass;
    the cutoff (highest retained index) is ``len(weights) - 1`` and is at
    least 1.  Instances are immutable values.
    """

    weights: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weights must be 1-D with cutoff >= 1")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if w.min() < 0.0:
            raise ValueError(f"negative population: min weight = {w.min():.3e}")
        total = float(w.sum())
        if not (1.0 - self.tail_tol <= total <= 1.0 + self.tail_tol):
            raise ValueError(
                f"weights sum to {total!r}, outside 1 +/- {self.tail_tol:g}"
            )
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def cutoff(self) -> int:
        return self.weights.size - 1


def _check_tail_tol(tail_tol: float) -> None:
    if not (0.0 < tail_tol <= MAX_TAIL_TOL):
        raise ValueError(f"tail_tol must be in (0, {MAX_TAIL_TOL:g}], got {tail_tol}")


def _spats_tail_mass(cutoff: int, bar_n: float) -> float:
    """Mass of the photon-added thermal weights beyond ``cutoff`` (exact)."""
    x = bar_n / (1.0 + bar_n)
    # sum_{l>L} l x^l = x^{L+1} [(L+1) - L x] / (1-x)^2, then divide by nbar(nbar+1)
    return x ** (cutoff + 1) * ((cutoff + 1) - cutoff * x) * (1.0 + bar_n) / bar_n


def _spats_tail_moment(cutoff: int, bar_n: float) -> float:
    """First-moment mass sum_{l>L} l p_l of the photon-added thermal weights."""
    x = bar_n / (1.0 + bar_n)
    one_minus_x = 1.0 / (1.0 + bar_n)
    poly = cutoff**2 * one_minus_x**2 + 2.0 * cutoff * one_minus_x + 1.0 + x
    return x ** (cutoff + 1) * poly * (1.0 + bar_n) ** 2 / bar_n


def spats_weights(bar_n: float, tail_tol: float = DEFAULT_TAIL_TOL) -> FockDiagonalState:
    """Populations of the single photon-added thermal state (SPATS).

    p_l = l * nbar^(l-1) / (1 + nbar)^(l+1) for l >= 1 and p_0 = 0, where
    ``bar_n`` is the mean photon number of the thermal seed.  ``bar_n = 0``
    gives exactly the one-photon Fock state.  The cutoff is the smallest
    index at which both the analytic tail mass and the tail of the first
    moment fall below ``tail_tol`` (so the truncated mean photon number is
    accurate to ``tail_tol`` as well).
    """
    _check_tail_tol(tail_tol)
    if not (math.isfinite(bar_n) and bar_n >= 0.0):
        raise ValueError(f"bar_n must be finite and >= 0, got {bar_n}")
    if bar_n == 0.0:
        return FockDiagonalState(np.array([0.0, 1.0]), tail_tol)
    cutoff = 1
    while (
        _spats_tail_mass(cutoff, bar_n) >= tail_tol
        or _spats_tail_moment(cutoff, bar_n) >= tail_tol
    ):
        cutoff += 1
    l = np.arange(1, cutoff + 1, dtype=float)
    w = np.zeros(cutoff + 1)
    w[1:] = l * bar_n ** (l - 1.0) / (1.0 + bar_n) ** (l + 1.0)
    return FockDiagonalState(w, tail_tol)


def thermal_weights(n_mean: float, tail_tol: float = DEFAULT_TAIL_TOL) -> FockDiagonalState:
    """Bose-Einstein populations p_l = n^l / (1+n)^(l+1) of a thermal state.

    The geometric tail beyond cutoff L is exactly (n/(1+n))^(L+1); the cutoff
    also confines the first-moment tail x^(L+1) ((L+1) - L x) (1+n) below
    ``tail_tol`` so the truncated mean photon number stays accurate.
    """
    _check_tail_tol(tail_tol)
    if not (math.isfinite(n_mean) and n_mean >= 0.0):
        raise ValueError(f"n_mean must be finite and >= 0, got {n_mean}")
    if n_mean == 0.0:
        return FockDiagonalState(np.array([1.0, 0.0]), tail_tol)
    x = n_mean / (1.0 + n_mean)
    cutoff = 1
    while (
        x ** (cutoff + 1) >= tail_tol
        or x ** (cutoff + 1) * ((cutoff + 1) - cutoff * x) * (1.0 + n_mean) >= tail_tol
    ):
        cutoff += 1
    l = np.arange(cutoff + 1, dtype=float)
    w = x ** l / (1.0 + n_mean)
    return FockDiagonalState(w, tail_tol)


def mean_photon(state: FockDiagonalState) -> float:
    """Mean photon number sum_l l p_l of the retained weights."""
    l = np.arange(state.weights.size, dtype=float)
    return float(np.dot(l, state.weights))


def vacuum_population(state: FockDiagonalState) -> float:
    """Population p_0 of the vacuum component."""
    return float(state.weights[0])


def random_zero_vacuum_state(rng_seed: int, cutoff: int) -> FockDiagonalState:
    """Reproducible random state with exactly zero vacuum population.

    Weights on indices 1..cutoff are squared unit-normal draws, normalized to
    unit sum; they are strictly positive with probability one and fully
    determined by ``rng_seed``.
    """
    if cutoff < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff}")
    rng = np.random.default_rng(rng_seed)
    draws = rng.normal(size=cutoff) ** 2
    w = np.zeros(cutoff + 1)
    w[1:] = draws / draws.sum()
    return FockDiagonalState(w, tail_tol=DEFAULT_TAIL_TOL)


def _rate_rhs(n: float):
    """Right-hand side of the birth-death system at bath occupancy ``n``."""

    def rhs(_t: float, p: np.ndarray) -> np.ndarray:
        l = np.arange(p.size, dtype=float)
        out = -((n + 1.0) * l + n * (l + 1.0)) * p
        out[:-1] += (n + 1.0) * l[1:] * p[1:]
        out[1:] += n * l[1:] * p[:-1]
        return out

    return rhs


def evolve_fock_diagonal(
    state: FockDiagonalState,
    channel: ChannelParams,
    step_tol: float = 1e-10,
) -> FockDiagonalState:
    """Evolve a Fock-diagonal state through the thermal channel.

    Integrates the birth-death rate equations from 0 to ``channel.gamma_t``
    with an adaptive embedded 4th/5th-order Runge-Kutta pair at per-step
    tolerance ``step_tol``.  The working cutoff starts at the state's cutoff
    plus a margin of ceil(5*(n+1)) and is enlarged until the mass beyond it
    stays below ``step_tol``.

    Raises
    ------
    NonConvergenceError
        If the integrator fails or the cutoff enlargement cannot confine the
        tail mass.
    """
    if not (0.0 < step_tol <= 1e-3):
        raise ValueError(f"step_tol must be in (0, 1e-3], got {step_tol}")
    gamma_t = channel.gamma_t
    if gamma_t == 0.0:
        return state

    margin = math.ceil(5.0 * (channel.n + 1.0))
    initial_mass = float(state.weights.sum())
    final = None
    for _attempt in range(_MAX_ENLARGE_ATTEMPTS):
        size = state.weights.size + margin
        p0 = np.zeros(size)
        p0[: state.weights.size] = state.weights
        sol = solve_ivp(
            _rate_rhs(channel.n),
            (0.0, gamma_t),
            p0,
            method="RK45",
            rtol=step_tol,
            atol=max(step_tol * 1e-4, 1e-16),
        )
        if not sol.success:
            raise NonConvergenceError(
                "rate-equation integration failed", detail=sol.message, cutoff=size - 1
            )
        final = sol.y[:, -1]
        if not np.all(np.isfinite(final)):
            raise NonConvergenceError("rate-equation solution is not finite", cutoff=size - 1)
        # mass leaked through the truncation plus solver drift, relative to
        # what the state carried going in
        leak = initial_mass - float(final.sum())
        top_mass = float(final[-3:].sum())
        if abs(leak) < step_tol and top_mass < step_tol:
            break
        margin *= 2
    else:
        raise NonConvergenceError(
            "cutoff enlargement did not confine the tail mass",
            leak=leak,
            top_mass=top_mass,
            cutoff=size - 1,
            step_tol=step_tol,
        )

    negative = final < 0.0
    if np.any(final < -CLAMP_THRESHOLD):
        raise NonConvergenceError(
            "evolved populations below the clamping threshold",
            min_weight=float(final.min()),
            threshold=CLAMP_THRESHOLD,
        )
    if np.any(negative):
        logger.debug(
            "evolve_fock_diagonal: clamped %d weights in (-%.1e, 0) to zero",
            int(negative.sum()),
            CLAMP_THRESHOLD,
        )
        final = np.where(negative, 0.0, final)

    return FockDiagonalState(final, tail_tol=max(step_tol, state.tail_tol, DEFAULT_TAIL_TOL))
