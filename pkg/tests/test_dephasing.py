import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st_

from kerrbounds import dephasing as dp
from kerrbounds.errors import DomainError
from kerrbounds.oracle import qfi_exact
from kerrbounds.states import (
    MomentSet,
    ProbeState,
    coherent_moments,
    coherent_state,
    gaussian_saturating_moments,
)
from kerrbounds.verify import central_difference


def test_channel_identity_at_zero_noise():
    s = coherent_state(1.2)
    rho = dp.apply_linear_dephasing(s, 0.0, 0.0)
    assert np.array_equal(rho, np.outer(s.amplitudes, s.amplitudes.conj()))


def test_channel_damps_coherence():
    s = ProbeState(np.array([1, 0, 1]) / math.sqrt(2))
    rho = dp.apply_linear_dephasing(s, 0.0, math.sqrt(math.log(2) / 4))
    assert abs(rho[0, 2]) == pytest.approx(0.25, abs=1e-12)


def test_full_dephasing_kills_phase_information():
    s = coherent_state(2)
    rho = dp.apply_linear_dephasing(s, 0.1, 10.0)
    assert np.max(np.abs(rho - np.diag(np.diag(rho)))) < 1e-15
    n2 = s.number_levels**2
    drho = -1j * (n2[:, None] - n2[None, :]) * rho
    assert qfi_exact(rho, drho) < 1e-6


def test_second_order_kernel_is_trace_preserving():
    rho = dp.apply_second_order_dephasing(coherent_state(1.5), 0.2, 0.3)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_variational_examples():
    mom = coherent_moments(1)
    assert dp.variational_qfi_dephasing(mom, 0.7, 0.0) == pytest.approx(44)
    assert dp.variational_qfi_dephasing(mom, 1.0, 1.0) == pytest.approx(4)
    with pytest.warns(UserWarning):
        assert dp.variational_qfi_dephasing(mom, 0.0, 0.5) == 44


def test_lambda_min_examples():
    mom = coherent_moments(2)
    assert dp.lambda_min(mom, 0.0) == 0.0
    bd = math.sqrt(mom.m2 / (2 * mom.var_n2))
    assert dp.lambda_min(mom, bd) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        dp.lambda_min(MomentSet(0, 0, 0, 0), 1.0)


@pytest.mark.parametrize("bd", [0.05, 0.3, 1.0, 4.0])
def test_lambda_min_is_stationary(bd):
    mom = gaussian_saturating_moments(1.5)
    lam = dp.lambda_min(mom, bd)
    slope = central_difference(lambda x: dp.variational_qfi_dephasing(mom, bd, x), lam, h=1e-4)
    assert abs(slope) <= 1e-8 * max(1.0, 4 * mom.var_n2)


def test_bound_examples():
    assert dp.bound_linear_dephasing(coherent_moments(1), 1.0) == pytest.approx(math.sqrt(1 / 44 + 1 / 4))
    assert dp.bound_linear_dephasing(coherent_moments(1), 1.0) == pytest.approx(0.52223, abs=1e-5)
    assert dp.bound_linear_dephasing(gaussian_saturating_moments(1), 1.0) == pytest.approx(0.31735, abs=1e-5)
    assert dp.bound_second_order_dephasing(coherent_moments(1), 0.5) == pytest.approx(0.72300, abs=1e-5)


def test_noiseless_floor_is_exact():
    for mom in (coherent_moments(3), gaussian_saturating_moments(2)):
        ref = 1 / (2 * math.sqrt(mom.var_n2))
        assert dp.bound_linear_dephasing(mom, 0.0) == ref
        assert dp.bound_second_order_dephasing(mom, 0.0) == ref


def test_bounds_reject_degenerate_moments():
    with pytest.raises(DomainError):
        dp.bound_linear_dephasing(MomentSet(0, 0, 0, 0), 1.0)
    with pytest.raises(DomainError):
        dp.bound_second_order_dephasing(MomentSet(2, 4, 8, 16), 1.0)
    with pytest.raises(DomainError):
        dp.bound_linear_dephasing(coherent_moments(1), -1.0)


def test_asymptotic_examples():
    assert dp.asymptotic_dephasing(10, 1, "gaussian") == pytest.approx(0.040825, abs=1e-6)
    assert dp.asymptotic_dephasing(10, 1, "coherent") == pytest.approx(0.070711, abs=1e-6)
    ratio = dp.asymptotic_dephasing(7, 0.4, "gaussian") / dp.asymptotic_dephasing(7, 0.4, "coherent")
    assert ratio == pytest.approx(1 / math.sqrt(3), rel=1e-15)


@pytest.mark.parametrize("family,k", [("gaussian", 6), ("coherent", 2)])
def test_bound_approaches_asymptote(family, k):
    N = 1e4
    val = N * dp.bound_linear_dephasing(dp.family_moments(family, N), 1.0)
    assert val == pytest.approx(1 / math.sqrt(k), rel=0.01)


def test_validity_examples():
    assert dp.validity_radius(gaussian_saturating_moments(1), 1.0) == pytest.approx(2 + 5 / 352)
    assert dp.validity_radius(gaussian_saturating_moments(1), 1.0) == pytest.approx(2.0142, abs=1e-4)
    N = 1e3
    assert dp.validity_radius(coherent_moments(N), 0.0) == pytest.approx(1 / (4 * N), rel=2e-3)
    assert math.isinf(dp.validity_radius(MomentSet(2, 4, 8, 16), 1.0))
    assert dp.phase_window(coherent_moments(1), 1.0) == pytest.approx(0.1 * dp.validity_radius(coherent_moments(1), 1.0))


def test_env_delta_examples():
    assert dp.env_squeezing_delta(0) == 1.0
    assert dp.env_squeezing_delta(0.5625) == pytest.approx(0.5, abs=1e-15)
    assert dp.env_squeezing_delta(1e4) == pytest.approx(0.005, rel=1e-4)
    for x in (0.0, 0.3, 7.0, 1e6):
        assert dp.env_squeezing_delta(x) == pytest.approx(math.exp(-math.asinh(math.sqrt(x))), rel=1e-12)
    with pytest.raises(DomainError):
        dp.env_squeezing_delta(-1)


def test_environment_composition():
    plain = dp.bound_linear_dephasing(coherent_moments(5), 0.8)
    assert dp.bound_with_environment(5, 0, 0.8) == plain
    d = dp.env_squeezing_delta(3.0)
    assert dp.bound_with_environment(5, 3.0, 0.8, "gaussian") == dp.bound_linear_dephasing(gaussian_saturating_moments(5), 0.8 * d)
    assert dp.bound_with_environment(5, 3.0, 0.8, order="second_order") == dp.bound_second_order_dephasing(coherent_moments(5), 0.8 * d)


def test_environment_asymptotic_forms():
    lin = dp.bound_with_environment(1e3, 1e4, 1.0, "coherent", "linear", asymptotic=True)
    assert lin == pytest.approx(3.5355e-6, rel=0.01)
    assert lin == pytest.approx(dp.env_asymptotic_closed_form(1e3, 1e4, 1.0), rel=0.01)
    sec = dp.bound_with_environment(1e6, 1e4, 1.0, "coherent", "second_order")
    assert sec == pytest.approx(7.0711e-3, rel=0.01)
    assert math.isinf(dp.env_asymptotic_closed_form(10, 0, 1.0))


def test_config_effective_spread():
    assert dp.DephasingConfig("linear", 0.4).effective_spread == 0.4
    assert dp.DephasingConfig("linear", 0.4, 0.5625).effective_spread == pytest.approx(0.2)
    with pytest.raises(DomainError):
        dp.DephasingConfig("cubic", 1.0)


@given(st_.floats(min_value=0.01, max_value=1e3), st_.floats(min_value=0.0, max_value=10.0), st_.floats(min_value=0.0, max_value=10.0))
def test_bound_monotone_in_noise(N, a, b):
    lo, hi = sorted((a, b))
    for mom in (coherent_moments(N), gaussian_saturating_moments(N)):
        assert dp.bound_linear_dephasing(mom, lo) <= dp.bound_linear_dephasing(mom, hi) * (1 + 1e-14)
        assert dp.bound_second_order_dephasing(mom, lo) <= dp.bound_second_order_dephasing(mom, hi) * (1 + 1e-14)


@given(st_.floats(min_value=0.01, max_value=1e3), st_.floats(min_value=0.0, max_value=10.0))
def test_bound_never_beats_noiseless(N, bd):
    mom = gaussian_saturating_moments(N)
    assert dp.bound_linear_dephasing(mom, bd) >= 1 / (2 * math.sqrt(mom.var_n2)) * (1 - 1e-14)


@given(st_.floats(min_value=0.0, max_value=1e6), st_.floats(min_value=0.0, max_value=1e6))
def test_env_delta_decreasing(a, b):
    lo, hi = sorted((a, b))
    assert dp.env_squeezing_delta(hi) <= dp.env_squeezing_delta(lo) <= 1.0
