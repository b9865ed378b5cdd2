"""Photon-loss precision bounds for phase estimation with generator n^2.

The central object is the loss Kraus family with phase exponent
``n^2 - 2*l1*k*n + l2*k^2``. For a fixed probe, the purification QFI of that
family is the variance of the exponent under the joint distribution
``P(n, k) = |psi_n|^2 c_nk(eta)``, which makes it a convex quadratic in
``(l1, l2)``. Minimization is therefore exact: a 2x2 linear solve plus a
clamp of ``l1`` to ``[0, 1]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import DomainError, SingularityError
from .states import MomentSet, ProbeState, moments_from_state

__all__ = [
    "LossConfig",
    "VariationalPoint",
    "BoundSample",
    "METHODS",
    "kraus_weight",
    "kraus_weights",
    "loss_probabilities",
    "variational_qfi",
    "minimize_variational_qfi",
    "fmin_analytic_general",
    "fmin_analytic_sv",
    "fmin_asymptotic",
    "bound_before_loss",
    "bound_lossless",
    "bound_averaged",
    "bound_weak_value",
    "linear_loss_reference",
    "delta_phi_from_F",
]

METHODS = (
    "lossless",
    "before_loss",
    "variational_min",
    "analytic_general",
    "analytic_sv",
    "asymptotic",
    "averaged",
    "weak_value",
    "linear_reference",
)

# conditional branches lighter than this carry no usable weak value
P_FLOOR = 1e-15


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity eta must lie in [0, 1], got {eta}")
    return eta


@dataclass(frozen=True)
class LossConfig:
    """Loss strength and the truncation of the loss-count sums.

    ``k_max=None`` means the full binomial support ``k <= n``.
    """

    eta: float
    k_max: int | None = 30

    def __post_init__(self):
        _check_eta(self.eta)
        if self.k_max is not None and self.k_max < 0:
            raise DomainError(f"k_max must be >= 0, got {self.k_max}")


@dataclass(frozen=True)
class VariationalPoint:
    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class BoundSample:
    """One evaluated bound: an upper bound on the QFI and the matching error floor."""

    method: str
    F_upper: float
    delta_phi_lower: float
    params: dict = field(default_factory=dict)

    @classmethod
    def from_F(cls, method: str, F: float, m: int = 1, **params) -> "BoundSample":
        return cls(method, float(F), delta_phi_from_F(F, m), dict(params))

    @classmethod
    def from_delta_phi(cls, method: str, dphi: float, m: int = 1, **params) -> "BoundSample":
        # dphi is the single-shot value; F is the single-shot QFI it corresponds to
        F = math.inf if dphi == 0 else 1.0 / dphi**2
        return cls(method, F, dphi / math.sqrt(m), dict(params))

    @property
    def diverged(self) -> bool:
        return math.isinf(self.delta_phi_lower)


def delta_phi_from_F(F: float, m: int = 1) -> float:
    """Quantum Cramer-Rao floor 1/sqrt(m F); infinite when F = 0."""
    if F < 0:
        raise DomainError(f"Fisher information must be >= 0, got {F}")
    if m < 1:
        raise DomainError(f"repetitions must be >= 1, got {m}")
    if F == 0:
        return math.inf
    return 1.0 / math.sqrt(m * F)


# ---------------------------------------------------------------------------
# loss weights
# ---------------------------------------------------------------------------


def kraus_weights(n, k, eta: float) -> np.ndarray:
    """c_nk(eta) = C(n, k) (1-eta)^k eta^(n-k), broadcast over n and k, zero for k > n."""
    eta = _check_eta(eta)
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    n, k = np.broadcast_arrays(n, k)
    out = np.zeros(n.shape)
    valid = k <= n
    nv, kv = n[valid], k[valid]
    log_c = (
        gammaln(nv + 1) - gammaln(kv + 1) - gammaln(nv - kv + 1)
        + xlogy(kv, 1.0 - eta) + xlogy(nv - kv, eta)
    )
    out[valid] = np.exp(log_c)
    return out


def kraus_weight(n: int, k: int, eta: float) -> float:
    return float(kraus_weights(n, k, eta))


def _joint(state: ProbeState, eta: float) -> np.ndarray:
    """Table W[k, n] = |psi_n|^2 c_nk(eta)."""
    n = state.number_levels
    return state.populations[None, :] * kraus_weights(n[None, :], n[:, None], eta)


def loss_probabilities(state: ProbeState, cfg: LossConfig) -> np.ndarray:
    """p_k for k = 0..k_max (k_max=None: the full support)."""
    W = _joint(state, cfg.eta)
    p = W.sum(axis=1)
    k_max = state.dim - 1 if cfg.k_max is None else cfg.k_max
    if k_max + 1 > p.size:
        p = np.append(p, np.zeros(k_max + 1 - p.size))
    return p[: k_max + 1]


# ---------------------------------------------------------------------------
# variational Kraus family
# ---------------------------------------------------------------------------


def _exponent_terms(dim: int):
    """Grids of n^2, -2kn and k^2 indexed [k, n]."""
    n = np.arange(dim, dtype=float)
    k = n[:, None]
    return np.broadcast_to(n**2, (dim, dim)), -2.0 * k * n, np.broadcast_to(k**2, (dim, dim))


def variational_qfi(state: ProbeState, cfg: LossConfig, pt: VariationalPoint) -> float:
    """Purification QFI 4[<H1> - <H2>^2] of the loss family at (lambda1, lambda2)."""
    W = _joint(state, cfg.eta)
    n = state.number_levels
    k = n[:, None]
    g = n**2 - 2.0 * pt.lambda1 * k * n + pt.lambda2 * k**2
    h1 = float(np.sum(W * g**2))
    h2 = float(np.sum(W * g))
    return 4.0 * (h1 - h2**2)


def _covariance(state: ProbeState, eta: float):
    """Weighted covariance S of (n^2, -2kn, k^2) and the leftover mass term.

    F(l1, l2) / 4 = u^T S u + (1 - mass) * <g>^2 with u = (1, l1, l2); the
    second term is nonzero only for truncated probes and is kept exact.
    """
    W = _joint(state, eta)
    mass = float(W.sum())
    X, Y, Z = _exponent_terms(state.dim)
    V = [X, Y, Z]
    mean = np.array([np.sum(W * v) for v in V])
    S = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            # centred products keep the n^4-sized terms from cancelling
            S[i, j] = S[j, i] = np.sum(W * (V[i] - mean[i] / mass) * (V[j] - mean[j] / mass))
    return S, mean, mass


def _quad_value(S, mean, mass, l1, l2) -> float:
    u = np.array([1.0, l1, l2])
    g_mean = float(u @ mean)
    return 4.0 * (float(u @ S @ u) + (g_mean / mass) ** 2 * mass * (1.0 - mass))


def _best_lambda2(S, l1: float) -> float:
    if S[2, 2] <= 0.0:
        return 0.0
    return -(S[2, 0] + l1 * S[2, 1]) / S[2, 2]


def minimize_variational_qfi(
    state: ProbeState,
    cfg: LossConfig,
    mode: Literal["exact", "grid"] = "exact",
) -> tuple[float, VariationalPoint]:
    """Minimum of the variational QFI over 0 <= lambda1 <= 1 and free lambda2.

    ``mode="exact"`` solves the stationarity conditions of the quadratic and
    clamps lambda1; ``mode="grid"`` scans 101 values of lambda1 with the
    closed-form lambda2 at each, as a cross-check.
    """
    eta = cfg.eta
    if eta == 0.0:
        return 0.0, VariationalPoint(1.0, 1.0)
    if eta == 1.0:
        return 4.0 * moments_from_state(state).var_n2, VariationalPoint(1.0, 1.0)

    S, mean, mass = _covariance(state, eta)
    # the truncation correction is O(tail_mass) and ignored when locating the optimum
    if mode == "grid":
        candidates = np.linspace(0.0, 1.0, 101)
    elif mode == "exact":
        A = S[1:, 1:]
        b = -S[1:, 0]
        sol, *_ = np.linalg.lstsq(A, b, rcond=1e-13)
        l1 = float(sol[0])
        if 0.0 <= l1 <= 1.0:
            candidates = [l1]
        else:
            candidates = [min(max(l1, 0.0), 1.0)]
    else:
        raise DomainError(f"unknown mode {mode!r}")

    best = None
    for l1 in candidates:
        l2 = _best_lambda2(S, float(l1))
        val = _quad_value(S, mean, mass, float(l1), l2)
        if best is None or val < best[0]:
            best = (val, VariationalPoint(float(l1), l2))
    F, pt = best
    return max(F, 0.0), pt


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _guard(den: float, scale: float, what: str) -> None:
    if abs(den) <= 1e-14 * max(scale, 1.0):
        raise SingularityError(f"{what}: denominator {den!r} is numerically zero")


def fmin_analytic_general(mom: MomentSet, eta: float) -> float:
    """Minimum over lambda2 at lambda1 = 1, written in the probe moments."""
    e = _check_eta(eta)
    if e == 0.0:
        return 0.0
    m1, m2, m3, m4 = mom.as_tuple()
    v = mom.var_n2
    a = e * (e - 1.0)
    b = (2.0 * e - 1.0) ** 2
    num = (
        (a * b * m1**2 + (6 * a + 1) * b * m1 - a * (7 * b * m2 - 4 * a * m3)) * m4
        + a * ((12 * a + 1) * m3 - 4 * a * (m1 + 6) * m1 - 4 * m1) * m3
        - 2 * a * (2 * (a + 1) + (8 * a + 1) * m1) * m3 * m2
        - (4 * a * (a * (m3 - 4) - 1) + (2 * a + 1) * b * m1) * m2**2
        + 7 * a * b * m2**3
    )
    den_terms = (
        (1 - e) ** 3 * v,
        -a * (11 * e + 2 * (e - 1) * m1 - 4) * m2,
        e * (m1 + (e - 1) * (6 * (e - 1) * m3 + e * (m1 + 6) * m1)),
    )
    den = math.fsum(den_terms)
    _guard(den, max(abs(t) for t in den_terms), "fmin_analytic_general")
    return 4.0 * e * num / den


def fmin_analytic_sv(N: float, eta: float) -> float:
    """The same minimum with squeezed-vacuum moments substituted."""
    e = _check_eta(eta)
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    a = e * (e - 1.0)
    num = (
        N * (a * (16 * a + 69) - 10)
        - 3 * N**2 * (3 * a * (18 * a - 31) + 7)
        - 6 * N**3 * (73 * e * (e * (2 * e * (e - 2) + 1) + 1) + 2)
        - 6 * N**4 * a * (236 * a - 37)
        - 720 * N**5 * a**2
        + 6 * a
        - 1
    )
    den = (
        4 * N * (e - 1) * (24 * N**2 * (e - 1) ** 2 + 21 * N * (e - 2) * (e - 1) + e * (2 * e - 17) + 20)
        + 7 * e
        - 8
    )
    _guard(den, 8.0 + 96.0 * N**3, "fmin_analytic_sv")
    return 32.0 * N * e * num / den


def fmin_asymptotic(N: float, eta: float) -> float:
    """Leading large-N term 240 eta^3 N^3 / (1 - eta); infinite in the lossless limit."""
    e = _check_eta(eta)
    if e == 1.0:
        return math.inf
    return 240.0 * e**3 * N**3 / (1.0 - e)


def bound_before_loss(mom: MomentSet, eta: float) -> float:
    """Purification bound for loss placed ahead of the Kerr medium."""
    e = _check_eta(eta)
    m1, m2, m3, _ = mom.as_tuple()
    return 4.0 * (
        e**4 * mom.var_n2
        - 6 * e**3 * (e - 1) * m3
        + e**2 * (11 * e**2 - 18 * e + 7) * m2
        - e * (6 * e**3 - 12 * e**2 + 7 * e - 1) * m1
        + 2 * e**3 * (e - 1) * m2 * m1
        - e**2 * (e - 1) ** 2 * m1**2
    )


def bound_lossless(mom: MomentSet) -> float:
    return 4.0 * mom.var_n2


# ---------------------------------------------------------------------------
# comparison bounds
# ---------------------------------------------------------------------------


def bound_averaged(state: ProbeState, cfg: LossConfig) -> float:
    """Convexity bound: average of the pure-state QFI over the post-loss branches.

    Summed over the full binomial support; ``cfg.k_max`` is not applied here
    because dropping heavy-loss branches would remove positive terms and
    the result would stop being an upper bound.
    """
    W = _joint(state, cfg.eta)
    n = state.number_levels
    total = 0.0
    for k in range(state.dim):
        row = W[k, k:]
        pk = row.sum()
        if pk < P_FLOOR:
            continue
        left = n[: row.size] ** 2  # photons surviving: n - k
        mean2 = np.dot(row, left) / pk
        total += 4.0 * np.dot(row, (left - mean2) ** 2)
    return float(total)


def weak_values(state: ProbeState, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Branch probabilities p_k and weak values of n^2 for the POVM E_k^dag E_k."""
    W = _joint(state, eta)
    n2 = state.number_levels ** 2
    p = W.sum(axis=1)
    w = np.divide(W @ n2, p, out=np.zeros_like(p), where=p >= P_FLOOR)
    return p, w


def bound_weak_value(state: ProbeState, cfg: LossConfig) -> float:
    """Weak-value bound 4 sum_k <psi|(n^2 - w_k) Pi_k (n^2 - w_k)|psi>.

    With every branch kept this equals 4[<n^4> - sum_k p_k w_k^2]. Branches
    beyond ``k_max`` are given w_k = 0, which can only enlarge the value, so
    the truncated result is still an upper bound.
    """
    p, w = weak_values(state, cfg.eta)
    k_max = state.dim - 1 if cfg.k_max is None else cfg.k_max
    kept = slice(0, k_max + 1)
    n4 = float(np.dot(state.populations, state.number_levels**4))
    return 4.0 * (n4 - float(np.dot(p[kept], w[kept] ** 2)))


def linear_loss_reference(N: float, eta: float) -> float:
    """Asymptotic error floor of the lossy linear (generator n) scheme."""
    e = _check_eta(eta)
    if e == 0.0:
        return math.inf
    if N <= 0:
        raise DomainError(f"N must be > 0, got {N}")
    return math.sqrt((1.0 - e) / e) / (2.0 * math.sqrt(N))
