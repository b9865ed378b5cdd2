"""Phase-diffusion bounds for phase estimation with generator n^2.

Linear diffusion couples n to the position of an environment oscillator,
second-order diffusion couples n^2. Either way the bounds depend on the
coupling strength and the environment position spread only through their
product, called ``strength_spread`` below (beta*Delta or gamma*Delta).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError
from .states import MomentSet, ProbeState, coherent_moments, gaussian_saturating_moments

__all__ = [
    "DephasingConfig",
    "apply_linear_dephasing",
    "apply_second_order_dephasing",
    "variational_qfi_dephasing",
    "lambda_min",
    "bound_linear_dephasing",
    "asymptotic_dephasing",
    "validity_radius",
    "phase_window",
    "env_squeezing_delta",
    "bound_second_order_dephasing",
    "bound_with_environment",
    "env_asymptotic_closed_form",
    "family_moments",
]

Order = Literal["linear", "second_order"]
Family = Literal["gaussian", "coherent"]

# "|phi| << radius" is read as |phi| <= VALIDITY_SAFETY * radius
VALIDITY_SAFETY = 0.1


@dataclass(frozen=True)
class DephasingConfig:
    """Noise order and strength.

    Without ``env_excitations`` the spread is the plain product
    strength*Delta. With it, ``strength_spread`` is read as the bare coupling
    (the value at Delta = 1, vacuum environment) and Delta is derived from
    the number of environment excitations.
    """

    order: Order
    strength_spread: float
    env_excitations: float | None = None

    def __post_init__(self):
        if self.order not in ("linear", "second_order"):
            raise DomainError(f"unknown dephasing order {self.order!r}")
        if not self.strength_spread >= 0:
            raise DomainError(f"strength_spread must be >= 0, got {self.strength_spread}")
        if self.env_excitations is not None and not self.env_excitations >= 0:
            raise DomainError(f"env_excitations must be >= 0, got {self.env_excitations}")

    @property
    def effective_spread(self) -> float:
        if self.env_excitations is None:
            return self.strength_spread
        return self.strength_spread * env_squeezing_delta(self.env_excitations)


def family_moments(family: Family, N: float) -> MomentSet:
    if family == "gaussian":
        return gaussian_saturating_moments(N)
    if family == "coherent":
        return coherent_moments(N)
    raise DomainError(f"unknown state family {family!r}")


def _check_spread(x: float, name: str) -> float:
    x = float(x)
    if not x >= 0:
        raise DomainError(f"{name} must be >= 0, got {x}")
    return x


def apply_linear_dephasing(state: ProbeState, phi: float, beta_delta: float) -> np.ndarray:
    """Probe density matrix after the Kerr phase and linear phase diffusion."""
    bd = _check_spread(beta_delta, "beta_delta")
    psi = state.amplitudes
    n = state.number_levels
    diff = n[:, None] - n[None, :]
    phase = np.exp(-1j * phi * (n[:, None] ** 2 - n[None, :] ** 2) - bd**2 * diff**2)
    return np.outer(psi, psi.conj()) * phase


def apply_second_order_dephasing(state: ProbeState, phi: float, gamma_delta: float) -> np.ndarray:
    """Analogue of :func:`apply_linear_dephasing` with damping exp(-(g D)^2 (n^2 - m^2)^2).

    Only used for sanity checks against the second-order bound; the kernel
    follows by analogy with the n^2 coupling and is not a derived channel.
    """
    gd = _check_spread(gamma_delta, "gamma_delta")
    psi = state.amplitudes
    n2 = state.number_levels ** 2
    d2 = n2[:, None] - n2[None, :]
    return np.outer(psi, psi.conj()) * np.exp(-1j * phi * d2 - gd**2 * d2**2)


def variational_qfi_dephasing(mom: MomentSet, beta_delta: float, lam: float) -> float:
    """Purification QFI of the single-parameter environment rotation."""
    bd = _check_spread(beta_delta, "beta_delta")
    noiseless = 4.0 * mom.var_n2
    if bd == 0.0:
        if lam != 0.0:
            warnings.warn("beta_delta = 0: only lam = 0 is meaningful; returning the noiseless value")
        return noiseless
    return (1.0 - lam) ** 2 * noiseless + lam**2 / (2.0 * bd**2) * 4.0 * mom.m2


def lambda_min(mom: MomentSet, beta_delta: float) -> float:
    bd = _check_spread(beta_delta, "beta_delta")
    if mom.m2 == 0.0 and mom.var_n2 == 0.0:
        raise DomainError("lambda_min is undefined for the vacuum probe")
    t = 2.0 * bd**2 * mom.var_n2
    return t / (mom.m2 + t)


def _require_variance(mom: MomentSet) -> None:
    if mom.var_n2 <= 0.0:
        raise DomainError("bound needs a probe with nonzero variance of n^2")


def bound_linear_dephasing(mom: MomentSet, beta_delta: float) -> float:
    """Error floor under linear phase diffusion."""
    bd = _check_spread(beta_delta, "beta_delta")
    _require_variance(mom)
    if bd == 0.0:
        return 1.0 / (2.0 * math.sqrt(mom.var_n2))
    if mom.m2 <= 0.0:
        raise DomainError("bound needs <n^2> > 0")
    return math.sqrt(1.0 / (4.0 * mom.var_n2) + 2.0 * bd**2 / (4.0 * mom.m2))


def asymptotic_dephasing(N: float, beta_delta: float, family: Family) -> float:
    """Large-N form of :func:`bound_linear_dephasing`; pure 1/N scaling."""
    if N <= 0:
        raise DomainError(f"N must be > 0, got {N}")
    bd = _check_spread(beta_delta, "beta_delta")
    if family == "gaussian":
        return bd / (math.sqrt(6.0) * N)
    if family == "coherent":
        return bd / (math.sqrt(2.0) * N)
    raise DomainError(f"unknown state family {family!r}")


def validity_radius(mom: MomentSet, beta_delta: float) -> float:
    """Scale of |phi| below which the linear-diffusion bound was derived."""
    bd = _check_spread(beta_delta, "beta_delta")
    if mom.var_n2 == 0.0:
        return math.inf
    return 2.0 * bd**2 + mom.m2 / mom.var_n2


def phase_window(mom: MomentSet, beta_delta: float, safety: float = VALIDITY_SAFETY) -> float:
    """|phi| up to which the bound is reported as valid."""
    return safety * validity_radius(mom, beta_delta)


def env_squeezing_delta(N_E: float) -> float:
    """Position spread of a squeezed environment with N_E mean excitations (vacuum: 1)."""
    if not N_E >= 0:
        raise DomainError(f"N_E must be >= 0, got {N_E}")
    # exp(-arcsinh x) = sqrt(x^2 + 1) - x, written without cancellation
    return 1.0 / (math.sqrt(N_E) + math.sqrt(N_E + 1.0))


def bound_second_order_dephasing(mom: MomentSet, gamma_delta: float) -> float:
    gd = _check_spread(gamma_delta, "gamma_delta")
    _require_variance(mom)
    if gd == 0.0:
        return 1.0 / (2.0 * math.sqrt(mom.var_n2))
    return math.sqrt(1.0 / (4.0 * mom.var_n2) + 2.0 * gd**2)


def bound_with_environment(
    N: float,
    N_E: float,
    strength: float,
    family: Family = "coherent",
    order: Order = "linear",
    asymptotic: bool = False,
) -> float:
    """Diffusion bound with a squeezed environment, Delta = env_squeezing_delta(N_E).

    ``asymptotic=True`` returns the large-N form at the same Delta:
    strength*Delta/(sqrt(k) N) for linear diffusion, sqrt(2)*strength*Delta
    for second order.
    """
    spread = _check_spread(strength, "strength") * env_squeezing_delta(N_E)
    if order == "linear":
        if asymptotic:
            return asymptotic_dephasing(N, spread, family)
        return bound_linear_dephasing(family_moments(family, N), spread)
    if order == "second_order":
        if asymptotic:
            return math.sqrt(2.0) * spread
        return bound_second_order_dephasing(family_moments(family, N), spread)
    raise DomainError(f"unknown dephasing order {order!r}")


def env_asymptotic_closed_form(N: float, N_E: float, strength: float, order: Order = "linear") -> float:
    """Leading term for large N and N_E.

    Linear diffusion (coherent probe): strength / (2 sqrt(2) N sqrt(N_E)).
    Second order (any probe): strength / (sqrt(2) sqrt(N_E)).
    """
    if N_E <= 0:
        return math.inf
    if order == "linear":
        if N <= 0:
            raise DomainError(f"N must be > 0, got {N}")
        return strength / (2.0 * math.sqrt(2.0) * N * math.sqrt(N_E))
    if order == "second_order":
        return strength / (math.sqrt(2.0) * math.sqrt(N_E))
    raise DomainError(f"unknown dephasing order {order!r}")
