import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_

from kerrbounds import lossbounds as lb
from kerrbounds import oracle as orc
from kerrbounds.dephasing import bound_linear_dephasing
from kerrbounds.errors import DomainError
from kerrbounds.states import (
    TruncationPolicy,
    coherent_moments,
    coherent_state,
    fock_basis_state,
    gaussian_saturating_moments,
    squeezed_vacuum_state,
)
from kerrbounds.verify import central_difference

SMALL = TruncationPolicy(max_dim=orc.ORACLE_MAX_DIM)


def commutator_derivative(state):
    n2 = state.number_levels**2
    rho = np.outer(state.amplitudes, state.amplitudes.conj())
    return rho, -1j * (n2[:, None] - n2[None, :]) * rho


def test_pure_state_identity():
    for s in (coherent_state(1.0), squeezed_vacuum_state(0.6, SMALL), fock_basis_state(3)):
        rho, drho = commutator_derivative(s)
        assert orc.qfi_exact(rho, drho) == pytest.approx(orc.qfi_pure(s), abs=1e-8)
    assert orc.qfi_exact(*commutator_derivative(coherent_state(1.0))) == pytest.approx(44, abs=1e-6)


def test_qfi_pure_examples():
    assert orc.qfi_pure(fock_basis_state(4)) == 0
    assert orc.qfi_pure(squeezed_vacuum_state(1)) == pytest.approx(1408, rel=1e-8)
    assert orc.qfi_pure(coherent_state(2)) == pytest.approx(232, rel=1e-8)


def test_dephased_diagonal_has_zero_qfi():
    rho = np.diag([0.2, 0.3, 0.5])
    assert orc.qfi_exact(rho, np.zeros((3, 3))) == 0.0


def test_non_hermitian_rejected():
    with pytest.raises(DomainError):
        orc.qfi_exact(np.array([[1, 1], [0, 0]]), np.zeros((2, 2)))


def test_loss_channel_examples():
    s = coherent_state(1.5)
    rho = orc.apply_loss_channel(s, 0.4, 1.0, 0.5)
    assert np.linalg.eigvalsh(rho)[-1] == pytest.approx(1.0, abs=1e-12)
    one = orc.apply_loss_channel(fock_basis_state(1), 0.7, 0.5, 0.3)
    assert np.allclose(one, np.diag([0.5, 0.5]), atol=1e-15)
    assert np.allclose(orc.channel_derivative(fock_basis_state(1), 0.7, 0.5, 0.3), 0)


def test_placement_matters_off_diagonal_only():
    s = coherent_state(2)
    a = orc.apply_loss_channel(s, 0.3, 0.6, 0.0)
    b = orc.apply_loss_channel(s, 0.3, 0.6, 1.0)
    assert np.max(np.abs(a - b)) > 1e-3
    assert np.allclose(np.diag(a), np.diag(b), atol=1e-14)


@pytest.mark.parametrize("eta", [0.0, 0.25, 0.8, 1.0])
def test_beam_splitter_oracle(eta):
    for s in (coherent_state(1.0), squeezed_vacuum_state(0.5, SMALL)):
        for l1 in (0.0, 1.0):
            assert np.allclose(orc.beam_splitter_loss(s, eta), orc.apply_loss_channel(s, 0.0, eta, l1), atol=1e-10)


def test_lossless_derivative_is_commutator():
    s = coherent_state(1.3)
    rho = orc.apply_loss_channel(s, 0.2, 1.0, 0.0)
    n2 = np.diag(s.number_levels**2)
    assert np.allclose(orc.channel_derivative(s, 0.2, 1.0, 0.0), -1j * (n2 @ rho - rho @ n2), atol=1e-12)


@pytest.mark.parametrize("eta,l1,phi", [(0.7, 0.0, 0.2), (0.4, 0.5, -0.3), (0.9, 1.0, 0.1)])
def test_derivative_matches_finite_difference(eta, l1, phi):
    s = squeezed_vacuum_state(0.8, SMALL)
    d = orc.channel_derivative(s, phi, eta, l1)
    fd = central_difference(lambda x: orc.apply_loss_channel(s, x, eta, l1), phi)
    assert np.max(np.abs(d - fd)) <= 1e-6


@settings(max_examples=20, deadline=None)
@given(st_.floats(min_value=0.0, max_value=1.0), st_.floats(min_value=0.0, max_value=1.0), st_.floats(min_value=-1.0, max_value=1.0))
def test_loss_channel_trace_preserving(eta, l1, phi):
    rho = orc.apply_loss_channel(coherent_state(1.1), phi, eta, l1)
    orc.check_density_matrix(rho)


def test_purification_examples():
    s = coherent_state(2)
    assert orc.qfi_purification(orc.unitary_kraus_family(s.dim, 0.3), s) == pytest.approx(orc.qfi_pure(s), rel=1e-10)
    fam = orc.loss_kraus_family(s.dim, 0.0, 0.6, 0.4, -0.7)
    assert orc.qfi_purification(fam, s) == pytest.approx(
        lb.variational_qfi(s, lb.LossConfig(0.6), lb.VariationalPoint(0.4, -0.7)), abs=1e-8
    )
    deph = orc.dephasing_kraus_family(s.dim, 0.0, 0.5, lam=0.0)
    assert orc.qfi_purification(deph, s) == pytest.approx(orc.qfi_pure(s), rel=1e-8)


def test_incomplete_family_rejected():
    fam = orc.KrausFamily((0.5 * np.eye(2),), (np.zeros((2, 2)),))
    with pytest.raises(DomainError):
        orc.qfi_purification(fam, fock_basis_state(1))


def test_lambda2_does_not_change_rho():
    s = coherent_state(1.4)
    fams = [orc.loss_kraus_family(s.dim, 0.3, 0.5, 0.6, l2) for l2 in (-1.0, 0.0, 2.5)]
    rhos = [sum(E @ np.outer(s.amplitudes, s.amplitudes.conj()) @ E.conj().T for E in f.operators) for f in fams]
    for r in rhos:
        assert np.allclose(r, orc.apply_loss_channel(s, 0.3, 0.5, 0.6), atol=1e-12)


DOMINANCE_STATES = [coherent_state(2), squeezed_vacuum_state(1, SMALL), fock_basis_state(2)]


@pytest.mark.parametrize("state", DOMINANCE_STATES)
@pytest.mark.parametrize("eta,l1", list(product([0.3, 0.6, 0.9], [0.0, 0.5, 1.0])))
def test_exact_qfi_below_every_purification(state, eta, l1):
    exact = orc.qfi_exact(orc.apply_loss_channel(state, 0.0, eta, l1), orc.channel_derivative(state, 0.0, eta, l1))
    for l2 in (-1.0, 0.0, 1.0, 2.0):
        assert exact <= lb.variational_qfi(state, lb.LossConfig(eta), lb.VariationalPoint(l1, l2)) + 1e-8


@pytest.mark.parametrize("eta", [0.3, 0.9])
def test_loss_before_qfi_is_phase_invariant(eta):
    s = squeezed_vacuum_state(1, SMALL)
    vals = [orc.qfi_exact(orc.apply_loss_channel(s, p, eta, 1.0), orc.channel_derivative(s, p, eta, 1.0)) for p in (0.0, 0.4, 1.3)]
    assert np.allclose(vals, vals[0], rtol=1e-8)


def test_dephasing_oracle_examples():
    s = coherent_state(2)
    assert orc.qfi_exact_dephasing(s, 0.0) == pytest.approx(orc.qfi_pure(s), rel=1e-8)
    assert orc.qfi_exact_dephasing(s, 10.0) < 1e-6
    assert orc.qfi_exact_dephasing(s, 0.5) <= bound_linear_dephasing(coherent_moments(2), 0.5) ** -2


@pytest.mark.parametrize("bd", [0.05, 0.2, 0.5, 1.0, 2.0])
def test_dephasing_dominance(bd):
    pairs = [(coherent_state(2), coherent_moments(2)), (squeezed_vacuum_state(1, SMALL), gaussian_saturating_moments(1))]
    for s, mom in pairs:
        assert orc.qfi_exact_dephasing(s, bd) <= bound_linear_dephasing(mom, bd) ** -2 + 1e-8


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.3, 1.0])
def test_dephasing_purification_dominates_exact(lam):
    # any environment phase gives a valid purification, so its QFI bounds the exact one
    s = coherent_state(1.5)
    fam = orc.dephasing_kraus_family(s.dim, 0.0, 0.4, lam)
    assert fam.completeness_defect() < 1e-10
    assert orc.qfi_exact_dephasing(s, 0.4) <= orc.qfi_purification(fam, s) + 1e-8


def test_density_matrix_checks():
    orc.check_density_matrix(np.diag([0.5, 0.5]))
    with pytest.raises(DomainError):
        orc.check_density_matrix(np.diag([0.7, 0.7]))
    with pytest.raises(DomainError):
        orc.check_density_matrix(np.diag([1.5, -0.5]))
    assert math.isfinite(orc.SLD_FLOOR)
