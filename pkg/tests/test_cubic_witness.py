import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

import spinwitness as sw
from spinwitness.cubic_witness import CubicParams, cubic_phases
from spinwitness.errors import DomainError


def test_cubic_unitary_trivial_cases():
    s = sw.make_system(2)
    params = CubicParams.from_chi(0.0, 2)
    np.testing.assert_allclose(sw.cubic_unitary(s, params), np.eye(3), atol=1e-15)

    chip = 0.37
    u = sw.cubic_unitary(s, CubicParams.from_chi_prime(chip, 2))
    np.testing.assert_allclose(np.diag(u),
                               [np.exp(-1j * chip), 1.0, np.exp(1j * chip)], atol=1e-14)


@pytest.mark.parametrize("n,chip", [(80, 7.96e-4), (40, 2e-3), (200, 1e-4)])
def test_cubic_unitary_matches_generic_exponential(n, chip):
    # oracle: scipy expm of the full cubic generator
    s = sw.make_system(n)
    params = CubicParams.from_chi_prime(chip, n)
    jz = sw.angular_momentum(s, "z").matrix
    generator = 1j * (params.chi / 3.0) * (n / 2.0) ** -1.5 \
        * np.linalg.matrix_power(jz, 3)
    oracle = expm(generator)
    assert np.abs(sw.cubic_unitary(s, params) - oracle).max() < 1e-12


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 30), c1=st.floats(-2, 2), c2=st.floats(-2, 2))
def test_cubic_unitary_additive_in_chi(n, c1, c2):
    s = sw.make_system(n)
    u1 = sw.cubic_unitary(s, CubicParams.from_chi(c1, n))
    u2 = sw.cubic_unitary(s, CubicParams.from_chi(c2, n))
    u12 = sw.cubic_unitary(s, CubicParams.from_chi(c1 + c2, n))
    assert np.abs(u1 @ u2 - u12).max() < 1e-12


def test_cubic_operator_reduces_to_jy_and_keeps_spectrum():
    s = sw.make_system(14)
    base = sw.cubic_operator(s, CubicParams.from_chi(0.0, 14))
    np.testing.assert_allclose(base.matrix, sw.angular_momentum(s, "y").matrix, atol=1e-15)

    oc = sw.witness_operator(s, 0.02)
    eigs = np.sort(np.linalg.eigvalsh(oc.matrix))
    np.testing.assert_allclose(eigs, np.arange(-7, 8), atol=1e-10)


@pytest.mark.parametrize("n", [4, 7, 10])
def test_z_reflection_maps_chi_to_minus_chi(n):
    # conjugating by the pi rotation about x reflects y and z, so the witness
    # maps to minus itself at the opposite chi
    s = sw.make_system(n)
    chip = 0.05
    oc_plus = sw.witness_operator(s, chip).matrix
    oc_minus = sw.witness_operator(s, -chip).matrix
    # pi rotation about x in zyz form
    u = sw.rotation_unitary(s, sw.RotationSpec(np.pi / 2, np.pi, -np.pi / 2))
    np.testing.assert_allclose(u @ oc_plus @ u.conj().T, -oc_minus, atol=1e-10)


def test_chi_conversions_round_trip():
    assert sw.chi_from_chi_prime(0.0, 17) == 0.0
    chi = sw.chi_from_chi_prime(7.96e-4, 80)
    assert chi == pytest.approx(3 * 7.96e-4 * 40**1.5, rel=1e-14)
    rng = np.random.default_rng(7)
    for _ in range(100):
        chip = rng.uniform(-1e-2, 1e-2)
        n = int(rng.integers(1, 300))
        back = sw.chi_prime_from_chi(sw.chi_from_chi_prime(chip, n), n)
        assert back == pytest.approx(chip, rel=1e-14, abs=1e-300)


def test_cubic_params_consistency_check():
    with pytest.raises(DomainError):
        CubicParams(chi=1.0, chi_prime=1.0, n_atoms=80)
    p = CubicParams.from_chi_prime(7.96e-4, 80)
    assert p.chi_prime == pytest.approx(sw.chi_prime_from_chi(p.chi, 80), rel=1e-14)


def test_mismatched_system_rejected():
    s = sw.make_system(10)
    params = CubicParams.from_chi_prime(1e-3, 12)
    with pytest.raises(DomainError):
        sw.cubic_unitary(s, params)
    with pytest.raises(DomainError):
        sw.cubic_operator(s, params)


def test_xi_to_db():
    assert sw.xi_to_db(1.0) == 0.0
    assert sw.xi_to_db(0.748) == pytest.approx(-1.26, abs=5e-3)
    assert sw.xi_to_db(0.715) == pytest.approx(-1.459, abs=5e-3)
    with pytest.raises(DomainError):
        sw.xi_to_db(0.0)
    with pytest.raises(DomainError):
        sw.xi_to_db(-0.3)


def test_swapped_generator_convention_gives_same_xi():
    # generator on Jy with base Jz, versus the standard Jz generator with base
    # Jy: equivalent up to the rotation mapping (y, z) -> (z, -y), so the
    # squeezing ratio of a correspondingly rotated state is unchanged
    n, chip = 12, 4e-3
    s = sw.make_system(n)
    state = sw.dicke_superposition(s, 0.5)
    standard = sw.xi_specific(state, chip, s)

    jy = sw.angular_momentum(s, "y").matrix
    jz = sw.angular_momentum(s, "z").matrix
    wy, vy = np.linalg.eigh(jy)
    u_c = (vy * np.exp(-1j * chip * wy**3)) @ vy.conj().T
    swapped = sw.SpinOperator(u_c @ jz @ u_c.conj().T, "swapped witness")

    # state rotated by the axis-mapping rotation (pi/2 about x)
    mapped = sw.apply_rotation(s, state, sw.RotationSpec(np.pi / 2, np.pi / 2, -np.pi / 2))
    num = sw.min_variance_over_rotations(s, mapped, swapped).variance
    den = sw.benchmark_min_variance(s, swapped).min_variance
    assert num / den == pytest.approx(standard.xi, rel=2e-3)


def test_cubic_phases_helper():
    s = sw.make_system(6)
    ph = cubic_phases(s, 0.1)
    np.testing.assert_allclose(ph, np.exp(1j * 0.1 * s.m_values() ** 3), atol=1e-15)
