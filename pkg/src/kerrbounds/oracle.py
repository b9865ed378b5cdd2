"""Exact quantum Fisher information and explicit Kraus-matrix evaluations.

Everything here works with dense matrices and is meant to check the
closed forms in :mod:`kerrbounds.lossbounds` and :mod:`kerrbounds.dephasing`
along code paths that share nothing with them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln, xlogy

from .errors import DomainError
from .states import ProbeState

__all__ = [
    "KrausFamily",
    "SLD_FLOOR",
    "ORACLE_MAX_DIM",
    "apply_loss_channel",
    "channel_derivative",
    "beam_splitter_loss",
    "loss_kraus_family",
    "dephasing_kraus_family",
    "unitary_kraus_family",
    "qfi_exact",
    "qfi_pure",
    "qfi_purification",
    "qfi_exact_dephasing",
    "check_density_matrix",
]

SLD_FLOOR = 1e-12
ORACLE_MAX_DIM = 256


@dataclass(frozen=True)
class KrausFamily:
    """Kraus operators E_k(phi) at one phi and their phi-derivatives."""

    operators: tuple
    derivatives: tuple

    def completeness_defect(self) -> float:
        dim = self.operators[0].shape[1]
        total = sum(E.conj().T @ E for E in self.operators)
        return float(np.max(np.abs(total - np.eye(dim))))


def check_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise DomainError(f"trace {np.trace(rho).real!r} differs from 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise DomainError("density matrix has a negative eigenvalue")


def _binomial_amplitudes(dim: int, eta: float) -> np.ndarray:
    """sqrt(c_nk) indexed [k, n], built independently of lossbounds."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    n = np.arange(dim, dtype=float)[None, :]
    k = np.arange(dim, dtype=float)[:, None]
    valid = k <= n
    nn, kk = np.where(valid, n, 0.0), np.where(valid, k, 0.0)
    log_c = gammaln(nn + 1) - gammaln(kk + 1) - gammaln(nn - kk + 1) + xlogy(kk, 1 - eta) + xlogy(nn - kk, eta)
    return np.where(valid, np.exp(0.5 * log_c), 0.0)


def _check_lambda1(lambda1: float) -> None:
    if not 0.0 <= lambda1 <= 1.0:
        raise DomainError(f"lambda1 must lie in [0, 1], got {lambda1}")


def _branches(state: ProbeState, phi: float, eta: float, lambda1: float):
    """Unnormalized post-loss branch vectors v_k and their generators.

    Row k holds E_k(phi)|psi> written in the output basis m = n - k, and
    g[k, m] is the exponent n^2 - 2 lambda1 k n evaluated at n = m + k.
    """
    _check_lambda1(lambda1)
    dim = state.dim
    amp = _binomial_amplitudes(dim, eta)
    n = np.arange(dim, dtype=float)
    V = np.zeros((dim, dim), dtype=complex)
    G = np.zeros((dim, dim))
    for k in range(dim):
        src = n[k:]
        g = src**2 - 2.0 * lambda1 * k * src
        V[k, : dim - k] = state.amplitudes[k:] * amp[k, k:] * np.exp(-1j * phi * g)
        G[k, : dim - k] = g
    return V, G


def apply_loss_channel(state: ProbeState, phi: float, eta: float, lambda1: float) -> np.ndarray:
    """rho(phi) = sum_k E_k(phi)|psi><psi|E_k(phi)^dag.

    The lambda2 k^2 term of the exponent is a per-branch global phase and
    drops out of rho, so it is not a parameter here.
    """
    V, _ = _branches(state, phi, eta, lambda1)
    return V.T @ V.conj()


def channel_derivative(state: ProbeState, phi: float, eta: float, lambda1: float) -> np.ndarray:
    V, G = _branches(state, phi, eta, lambda1)
    dV = -1j * G * V
    return dV.T @ V.conj() + V.T @ dV.conj()


def beam_splitter_loss(state: ProbeState, eta: float) -> np.ndarray:
    """Loss at phi = 0 from a two-mode beam splitter and a partial trace.

    Each total-photon-number block is exponentiated separately, so the
    construction is exact for the retained levels.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    theta = math.acos(math.sqrt(eta))
    dim = state.dim
    # out[j, lost] = amplitude of |j>_a |lost>_b
    out = np.zeros((dim, dim), dtype=complex)
    for total in range(dim):
        psi_n = state.amplitudes[total]
        if psi_n == 0:
            continue
        # basis |j, total - j>, j = 0..total; generator theta (a^dag b - a b^dag)
        j = np.arange(total)
        hop = np.sqrt((j + 1.0) * (total - j))
        gen = np.zeros((total + 1, total + 1))
        gen[j + 1, j] = hop
        gen[j, j + 1] = -hop
        col = expm(theta * gen)[:, total]  # input |total, 0>
        for jj in range(total + 1):
            out[jj, total - jj] += psi_n * col[jj]
    return out @ out.conj().T


def loss_kraus_family(dim: int, phi: float, eta: float, lambda1: float, lambda2: float) -> KrausFamily:
    """Explicit matrices of the generalized loss Kraus family on levels 0..dim-1."""
    amp = _binomial_amplitudes(dim, eta)
    n = np.arange(dim, dtype=float)
    ops, ders = [], []
    for k in range(dim):
        g = n**2 - 2.0 * lambda1 * k * n + lambda2 * k**2
        E = np.zeros((dim, dim), dtype=complex)
        src = np.arange(k, dim)
        E[src - k, src] = amp[k, src] * np.exp(-1j * phi * g[src])
        ops.append(E)
        ders.append(E @ np.diag(-1j * g))
    return KrausFamily(tuple(ops), tuple(ders))


def unitary_kraus_family(dim: int, phi: float) -> KrausFamily:
    n2 = np.arange(dim, dtype=float) ** 2
    U = np.diag(np.exp(-1j * phi * n2))
    return KrausFamily((U,), (U @ np.diag(-1j * n2),))


def dephasing_kraus_family(dim: int, phi: float, beta_delta: float, lam: float = 0.0, nodes: int = 80) -> KrausFamily:
    """Gauss-Hermite discretization of the mirror-position purification.

    Branch j: sqrt(w_j/sqrt(pi)) exp(-i phi n^2) exp(2i beta_delta t_j n), with
    the environment rotated by exp(-i phi lam h_j); ``lam`` acts as an
    environment-only phase per branch (h_j = t_j^2 / (4 beta_delta^2)).
    """
    t, w = np.polynomial.hermite.hermgauss(nodes)
    n = np.arange(dim, dtype=float)
    ops, ders = [], []
    for tj, wj in zip(t, w):
        h = 0.0 if beta_delta == 0 else lam * tj**2 / (4.0 * beta_delta**2)
        diag = math.sqrt(wj / math.sqrt(math.pi)) * np.exp(-1j * phi * (n**2 + h) + 2j * beta_delta * tj * n)
        ops.append(np.diag(diag))
        ders.append(np.diag(-1j * (n**2 + h) * diag))
    return KrausFamily(tuple(ops), tuple(ders))


def qfi_exact(rho: np.ndarray, drho: np.ndarray, floor: float = SLD_FLOOR) -> float:
    """QFI from the spectral form of the symmetric logarithmic derivative."""
    rho = np.asarray(rho)
    drho = np.asarray(drho)
    scale = max(float(np.max(np.abs(drho))), 1.0)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10 or np.max(np.abs(drho - drho.conj().T)) > 1e-10 * scale:
        raise DomainError("rho and drho must be Hermitian")
    p, U = np.linalg.eigh(rho)
    D = U.conj().T @ drho @ U
    denom = p[:, None] + p[None, :]
    mask = denom > floor * max(np.trace(rho).real, 1e-300)
    F = 2.0 * np.sum(np.abs(D[mask]) ** 2 / denom[mask])
    return float(max(F, 0.0))


def qfi_pure(state: ProbeState) -> float:
    n2 = state.number_levels ** 2
    p = state.populations
    return 4.0 * (float(np.dot(p, n2**2)) - float(np.dot(p, n2)) ** 2)


def qfi_purification(kraus: KrausFamily, state: ProbeState, tol: float = 1e-8) -> float:
    """4[<H1> - |<H2>|^2] for the purification sum_k E_k|psi>|k>."""
    defect = kraus.completeness_defect()
    if defect > tol:
        raise DomainError(f"Kraus family is not complete (defect {defect:.3g})")
    psi = state.amplitudes
    h1 = 0.0
    h2 = 0.0 + 0.0j
    for E, dE in zip(kraus.operators, kraus.derivatives):
        dpsi = dE @ psi
        h1 += float(np.vdot(dpsi, dpsi).real)
        h2 += np.vdot(dpsi, E @ psi)
    return 4.0 * (h1 - abs(h2) ** 2)


def qfi_exact_dephasing(state: ProbeState, beta_delta: float) -> float:
    """Exact QFI of the linearly dephased family at phi = 0 (it is phi independent)."""
    n = state.number_levels
    psi = state.amplitudes
    diff = n[:, None] - n[None, :]
    rho = np.outer(psi, psi.conj()) * np.exp(-(beta_delta**2) * diff**2)
    drho = -1j * (n[:, None] ** 2 - n[None, :] ** 2) * rho
    return qfi_exact(rho, drho)
