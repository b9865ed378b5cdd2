"""Truncated Fock-space probe states and photon-number moments.

Two routes to the moments are kept apart on purpose: closed forms for the
coherent and squeezed-vacuum families (used by every bound formula) and
direct sums over a truncated amplitude vector (used by the channel and
oracle code).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "TruncationPolicy",
    "ProbeState",
    "MomentSet",
    "coherent_state",
    "squeezed_vacuum_state",
    "fock_basis_state",
    "moments_from_state",
    "gaussian_saturating_moments",
    "coherent_moments",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to extend a Fock expansion.

    The cutoff is the smallest dimension for which both the discarded
    probability and the discarded contribution to <n^4> are at most
    ``tail_tolerance``. Weighting by n^4 keeps the fourth moment (and hence
    every bound built from it) accurate, not just the norm.
    """

    tail_tolerance: float = 1e-10
    max_dim: int = 4096

    def __post_init__(self):
        if not 0.0 < self.tail_tolerance < 1.0:
            raise DomainError(f"tail_tolerance must lie in (0, 1), got {self.tail_tolerance}")
        if self.max_dim < 1:
            raise DomainError(f"max_dim must be positive, got {self.max_dim}")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class ProbeState:
    """Single-mode pure probe state in a truncated number basis."""

    amplitudes: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DomainError("amplitudes must be a non-empty 1-D sequence")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if not 0.0 <= self.tail_mass <= 1.0:
            raise DomainError(f"tail_mass must lie in [0, 1], got {self.tail_mass}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm + self.tail_mass - 1.0) > 1e-12:
            raise DomainError(
                f"sum |psi_n|^2 + tail_mass = {norm + self.tail_mass!r}, expected 1"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def number_levels(self) -> np.ndarray:
        return np.arange(self.dim, dtype=float)


@dataclass(frozen=True)
class MomentSet:
    """Raw moments <n>, <n^2>, <n^3>, <n^4> and the variance of n^2."""

    m1: float
    m2: float
    m3: float
    m4: float
    var_n2: float = field(default=None)

    def __post_init__(self):
        if self.var_n2 is None:
            object.__setattr__(self, "var_n2", self.m4 - self.m2**2)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.m1, self.m2, self.m3, self.m4)


def _check_mean(N: float) -> float:
    N = float(N)
    if not math.isfinite(N) or N < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {N}")
    return N


def _truncate(log_pop: np.ndarray, policy: TruncationPolicy):
    """Pick the cutoff for a population vector given on [0, max_dim).

    Returns the retained populations and the discarded probability.
    """
    pop = np.exp(log_pop)
    n = np.arange(pop.size, dtype=float)
    # mass lying beyond max_dim altogether; only measurable to ~1e-16
    beyond = max(0.0, 1.0 - math.fsum(pop))
    # tail[d] = what is lost by keeping levels [0, d)
    tail = np.append(np.cumsum(pop[::-1])[::-1], 0.0) + beyond
    tail4 = np.append(np.cumsum((pop * n**4)[::-1])[::-1], 0.0)
    ok = (tail <= policy.tail_tolerance) & (tail4 <= policy.tail_tolerance)
    ok[-1] = True
    dim = 1 + int(np.argmax(ok[1:]))
    return pop[:dim], min(float(tail[dim]), 1.0)


def coherent_state(N: float, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbeState:
    """Coherent state |alpha> with real alpha = sqrt(N)."""
    N = _check_mean(N)
    if N == 0.0:
        return ProbeState(np.array([1.0 + 0j]))
    n = np.arange(policy.max_dim, dtype=float)
    log_pop = -N + n * math.log(N) - gammaln(n + 1)
    pop, tail = _truncate(log_pop, policy)
    return _finish(pop, tail)


def _finish(pop: np.ndarray, tail: float, signs: np.ndarray | None = None) -> ProbeState:
    amps = np.sqrt(pop)
    kept = math.fsum(pop)
    if kept > 0.0:
        # absorb rounding so the norm identity holds to machine precision
        amps *= math.sqrt((1.0 - tail) / kept)
    else:
        tail = 1.0
    if signs is not None:
        amps = amps * signs[: amps.size]
    return ProbeState(amps.astype(complex), tail)


def squeezed_vacuum_state(N: float, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbeState:
    """Squeezed vacuum with sinh^2 r = N (real squeezing, only even levels populated)."""
    N = _check_mean(N)
    if N == 0.0:
        return ProbeState(np.array([1.0 + 0j]))
    half = (policy.max_dim + 1) // 2
    # log |psi_{2m}|^2 via the ratio |psi_{2m+2}/psi_{2m}|^2 = (2m+1)/(2m+2) tanh^2 r
    log_t2 = math.log(N) - math.log1p(N)
    m = np.arange(half - 1, dtype=float)
    steps = np.log((2 * m + 1) / (2 * m + 2)) + log_t2
    log_even = np.concatenate(([-0.5 * math.log1p(N)], -0.5 * math.log1p(N) + np.cumsum(steps)))
    log_pop = np.full(policy.max_dim, -np.inf)
    log_pop[0::2] = log_even[: log_pop[0::2].size]
    pop, tail = _truncate(log_pop, policy)
    signs = np.ones(pop.size)
    signs[2::4] = -1.0  # (-tanh r)^m sign pattern
    return _finish(pop, tail, signs)


def fock_basis_state(n: int) -> ProbeState:
    if n < 0 or int(n) != n:
        raise DomainError(f"Fock level must be a nonnegative integer, got {n}")
    amps = np.zeros(int(n) + 1, dtype=complex)
    amps[-1] = 1.0
    return ProbeState(amps)


def moments_from_state(state: ProbeState) -> MomentSet:
    p = state.populations
    n = state.number_levels
    m1, m2, m3, m4 = (float(np.dot(p, n**q)) for q in (1, 2, 3, 4))
    return MomentSet(m1, m2, m3, m4, m4 - m2**2)


def gaussian_saturating_moments(N: float) -> MomentSet:
    """Squeezed-vacuum moments, which saturate the single-mode Gaussian bounds."""
    N = _check_mean(N)
    m2 = 3 * N**2 + 2 * N
    m3 = 15 * N**3 + 18 * N**2 + 4 * N
    m4 = 105 * N**4 + 180 * N**3 + 84 * N**2 + 8 * N
    var = 96 * N**4 + 168 * N**3 + 80 * N**2 + 8 * N
    return MomentSet(N, m2, m3, m4, var)


def coherent_moments(N: float) -> MomentSet:
    """Poisson raw moments."""
    N = _check_mean(N)
    m2 = N**2 + N
    m3 = N**3 + 3 * N**2 + N
    m4 = N**4 + 6 * N**3 + 7 * N**2 + N
    var = 4 * N**3 + 6 * N**2 + N
    return MomentSet(N, m2, m3, m4, var)
