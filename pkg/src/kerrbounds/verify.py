"""Self-checks run by ``kerrbounds verify``.

Each check returns ``(name, passed, detail)``. Functions from the bound
modules are looked up through the module objects at call time so that a
patched (deliberately broken) implementation is what gets checked.
"""
from __future__ import annotations

import math

import numpy as np

from . import dephasing as dp
from . import lossbounds as lb
from . import oracle as orc
from . import states as st

SUITES = ("states", "loss", "dephasing", "oracle")

_ORACLE_POLICY = st.TruncationPolicy(max_dim=orc.ORACLE_MAX_DIM)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def check_moment_closed_forms():
    worst = 0.0
    for N in (0.5, 1.0, 2.0, 5.0, 10.0):
        for build, closed in ((st.coherent_state, st.coherent_moments), (st.squeezed_vacuum_state, st.gaussian_saturating_moments)):
            a = st.moments_from_state(build(N)).as_tuple()
            b = closed(N).as_tuple()
            worst = max(worst, max(abs(x - y) for x, y in zip(a, b)))
    return "moment closed forms vs state vector", worst <= 1e-6, f"max abs diff {worst:.3g}"


def check_variance_identity():
    worst = 0.0
    for N in (0.0, 0.3, 1.0, 7.0, 20.0, 1e4):
        for mom in (st.coherent_moments(N), st.gaussian_saturating_moments(N)):
            worst = max(worst, abs(mom.var_n2 - (mom.m4 - mom.m2**2)) / max(mom.m4, 1.0))
    return "var_n2 = m4 - m2^2", worst <= 1e-10, f"max rel diff {worst:.3g}"


def check_squeezed_parity():
    odd = max(float(np.max(np.abs(st.squeezed_vacuum_state(N).amplitudes[1::2]), initial=0.0)) for N in (0.5, 1, 4))
    return "squeezed vacuum has no odd levels", odd == 0.0, f"max odd amplitude {odd}"


def check_sv_vs_general():
    worst = 0.0
    for N in (0.5, 1, 2, 5, 10, 20):
        for eta in np.linspace(0.1, 0.9, 9):
            worst = max(worst, _rel(lb.fmin_analytic_sv(N, eta), lb.fmin_analytic_general(st.gaussian_saturating_moments(N), eta)))
    return "fmin_analytic_sv = fmin_analytic_general(gaussian moments)", worst <= 1e-10, f"max rel diff {worst:.3g}"


def check_general_vs_minimizer():
    worst = 0.0
    for N in (0.5, 1, 2, 5, 10):
        s = st.squeezed_vacuum_state(N)
        mom = st.moments_from_state(s)
        for eta in (0.3, 0.6, 0.9):
            F, _ = lb.minimize_variational_qfi(s, lb.LossConfig(eta))
            worst = max(worst, _rel(lb.fmin_analytic_general(mom, eta), F))
    return "fmin_analytic_general equivalence with minimize_variational_qfi", worst <= 1e-6, f"max rel diff {worst:.3g}"


def check_lambda1_replication():
    # replication report only; a counterexample is logged, not failed
    misses = []
    for build in (st.squeezed_vacuum_state, st.coherent_state):
        for N in range(1, 11):
            s = build(N)
            for eta in (0.3, 0.6, 0.9):
                _, pt = lb.minimize_variational_qfi(s, lb.LossConfig(eta))
                if abs(pt.lambda1 - 1.0) > 1e-6:
                    misses.append((build.__name__, N, eta, pt.lambda1))
    detail = "lambda1 = 1 at all grid points" if not misses else f"counterexamples: {misses}"
    return "lambda1 = 1 optimality (replication, informational)", True, detail


def check_lossless_limit():
    worst = 0.0
    for s in (st.squeezed_vacuum_state(2), st.coherent_state(3)):
        mom = st.moments_from_state(s)
        ref = 4.0 * mom.var_n2
        cfg = lb.LossConfig(1.0)
        vals = (
            lb.bound_before_loss(mom, 1.0),
            lb.fmin_analytic_general(mom, 1.0),
            lb.minimize_variational_qfi(s, cfg)[0],
            lb.bound_averaged(s, cfg),
            lb.bound_weak_value(s, cfg),
        )
        worst = max(worst, max(_rel(v, ref) for v in vals))
    return "eta = 1 collapses every loss bound to 4 var(n^2)", worst <= 1e-9, f"max rel diff {worst:.3g}"


def check_minimum_below_corners():
    ok = True
    for s in (st.squeezed_vacuum_state(3), st.coherent_state(4), st.fock_basis_state(2)):
        for eta in (0.2, 0.5, 0.8):
            cfg = lb.LossConfig(eta)
            F, _ = lb.minimize_variational_qfi(s, cfg)
            for pt in (lb.VariationalPoint(0, 0), lb.VariationalPoint(1, 1)):
                ok &= F <= lb.variational_qfi(s, cfg, pt) + 1e-9
    return "minimum lies below the loss-after and loss-before corners", ok, ""


def check_loss_probability_anchor():
    s = st.squeezed_vacuum_state(20)
    total = float(lb.loss_probabilities(s, lb.LossConfig(0.9, 30)).sum())
    return "sum_{k<=30} p_k at N=20, eta=0.9", abs(total - 0.9998) <= 5e-4, f"{total:.6f}"


def check_lambda_min_identity():
    worst = 0.0
    for mom in (st.coherent_moments(3), st.gaussian_saturating_moments(2)):
        for bd in (0.1, 0.5, 1.0, 3.0):
            lam = dp.lambda_min(mom, bd)
            worst = max(worst, _rel(dp.variational_qfi_dephasing(mom, bd, lam), dp.bound_linear_dephasing(mom, bd) ** -2))
    return "variational dephasing QFI at lambda_min = 1/bound^2", worst <= 1e-10, f"max rel diff {worst:.3g}"


def check_dephasing_asymptotics():
    N = 1e4
    g = N * dp.bound_linear_dephasing(st.gaussian_saturating_moments(N), 1.0) * math.sqrt(6)
    c = N * dp.bound_linear_dephasing(st.coherent_moments(N), 1.0) * math.sqrt(2)
    worst = max(abs(g - 1), abs(c - 1))
    return "N * bound -> beta_delta/sqrt(6), /sqrt(2)", worst <= 0.01, f"max rel gap {worst:.3g}"


def check_noiseless_dephasing():
    mom = st.coherent_moments(5)
    ref = 1.0 / (2.0 * math.sqrt(mom.var_n2))
    ok = dp.bound_linear_dephasing(mom, 0.0) == ref and dp.bound_second_order_dephasing(mom, 0.0) == ref
    ok &= dp.env_squeezing_delta(0.0) == 1.0
    return "zero diffusion gives the noiseless floor; Delta(N_E=0) = 1", ok, ""


def central_difference(f, x: float, h: float = 1e-5):
    """Five-point central difference; O(h^4) so the stencil error stays below
    1e-6 for the Fock supports used here."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def check_derivative_fd():
    worst = 0.0
    for s in (st.coherent_state(1.5), st.squeezed_vacuum_state(0.8, _ORACLE_POLICY)):
        for eta, l1, phi in ((0.7, 0.0, 0.2), (0.4, 0.5, -0.3), (0.9, 1.0, 0.1)):
            d = orc.channel_derivative(s, phi, eta, l1)
            fd = central_difference(lambda x: orc.apply_loss_channel(s, x, eta, l1), phi)
            worst = max(worst, float(np.max(np.abs(d - fd))))
    return "channel_derivative vs central finite difference", worst <= 1e-6, f"max abs diff {worst:.3g}"


def check_purification_dominance():
    worst = -math.inf
    states_ = [st.coherent_state(2), st.squeezed_vacuum_state(1, _ORACLE_POLICY), st.fock_basis_state(2)]
    for s in states_:
        for eta in (0.3, 0.9):
            for l1 in (0.0, 0.5, 1.0):
                exact = orc.qfi_exact(orc.apply_loss_channel(s, 0.0, eta, l1), orc.channel_derivative(s, 0.0, eta, l1))
                for l2 in (-1.0, 0.0, 1.0, 2.0):
                    bound = lb.variational_qfi(s, lb.LossConfig(eta), lb.VariationalPoint(l1, l2))
                    worst = max(worst, exact - bound)
    return "exact QFI <= variational purification QFI", worst <= 1e-8, f"max excess {worst:.3g}"


def check_dephasing_oracle():
    worst = -math.inf
    for s, mom in ((st.coherent_state(2), st.coherent_moments(2)), (st.squeezed_vacuum_state(1, _ORACLE_POLICY), st.gaussian_saturating_moments(1))):
        for bd in (0.1, 0.5, 1.0):
            worst = max(worst, orc.qfi_exact_dephasing(s, bd) - dp.bound_linear_dephasing(mom, bd) ** -2)
    return "exact dephased QFI <= 1/bound^2", worst <= 1e-8, f"max excess {worst:.3g}"


def check_beam_splitter():
    worst = 0.0
    for s in (st.coherent_state(1.0), st.squeezed_vacuum_state(0.5)):
        for eta in (0.25, 0.8):
            worst = max(worst, float(np.max(np.abs(orc.beam_splitter_loss(s, eta) - orc.apply_loss_channel(s, 0.0, eta, 0.0)))))
    return "Kraus loss channel vs beam splitter + partial trace", worst <= 1e-10, f"max abs diff {worst:.3g}"


CHECKS = {
    "states": (check_moment_closed_forms, check_variance_identity, check_squeezed_parity),
    "loss": (
        check_sv_vs_general,
        check_general_vs_minimizer,
        check_lambda1_replication,
        check_lossless_limit,
        check_minimum_below_corners,
        check_loss_probability_anchor,
    ),
    "dephasing": (check_lambda_min_identity, check_dephasing_asymptotics, check_noiseless_dephasing),
    "oracle": (check_derivative_fd, check_purification_dominance, check_dephasing_oracle, check_beam_splitter),
}


def run(suite: str = "all"):
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        for check in CHECKS[name]:
            try:
                results.append(check())
            except Exception as exc:  # a crash is a failed check, not a crashed run
                results.append((check.__name__, False, f"{type(exc).__name__}: {exc}"))
    return results
