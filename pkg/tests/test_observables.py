import math

import numpy as np
import pytest

from cqedsim.model import (FockAmplitudes, coherent_amplitudes,
                           fock_basis_state, make_params, norm_squared)
from cqedsim.observables import (energy_expectation, excited_probability,
                                 field_expectation, mean_photon_number,
                                 sinusoid_deviation, unwrap_phase)
from cqedsim.spectral import build_hamiltonian


def random_state(rng, n_max):
    vec = rng.normal(size=2 * (n_max + 1)) + 1j * rng.normal(size=2 * (n_max + 1))
    vec /= np.linalg.norm(vec)
    return FockAmplitudes.from_vector(vec, n_max)


def test_excited_probability_cases():
    assert excited_probability(fock_basis_state(0, 5, True)) == 1.0
    assert excited_probability(fock_basis_state(5, 8, False)) == 0.0
    half = 1 / math.sqrt(2)
    st = FockAmplitudes(n_max=0, b=np.array([half], complex),
                        c=np.array([half], complex))
    assert excited_probability(st) == pytest.approx(0.5, abs=1e-15)


def test_probabilities_partition_norm_exactly():
    rng = np.random.default_rng(2)
    for _ in range(20):
        st = random_state(rng, 12)
        ground = float(np.sum(np.abs(st.c) ** 2))
        assert excited_probability(st) + ground == norm_squared(st)


def test_field_expectation_cases():
    for n in range(4):
        assert field_expectation(fock_basis_state(n, 6, True)) == 0.0
    half = 1 / math.sqrt(2)
    st = FockAmplitudes(n_max=3, b=np.array([half, half, 0, 0], complex),
                        c=np.zeros(4, complex))
    assert field_expectation(st) == pytest.approx(0.5 + 0j, abs=1e-15)


def test_field_expectation_coherent_eigenvalue():
    alpha = 1.2 - 0.4j
    st = coherent_amplitudes(alpha, 40, False)
    assert field_expectation(st) == pytest.approx(alpha, abs=1e-9)


def test_mean_photon_number_cases():
    assert mean_photon_number(fock_basis_state(0, 5, True)) == 0.0
    assert mean_photon_number(fock_basis_state(3, 5, False)) == 3.0
    st = coherent_amplitudes(2.0, 50, True)
    assert mean_photon_number(st) == pytest.approx(4.0, abs=1e-9)


def test_energy_expectation_cases():
    p = make_params(3.0, 2.0, 0.5)
    assert energy_expectation(fock_basis_state(0, 5, True), p) == pytest.approx(3.0)
    assert energy_expectation(fock_basis_state(4, 5, False), p) == pytest.approx(8.0)
    # (|e,0> + |g,1>)/sqrt(2) at w0 = wl = 1, real g: the coupling is
    # purely imaginary so the cross term has no real part
    half = 1 / math.sqrt(2)
    b = np.zeros(4, complex)
    c = np.zeros(4, complex)
    b[0] = half
    c[1] = half
    st = FockAmplitudes(n_max=3, b=b, c=c)
    assert energy_expectation(st, make_params(1, 1, 0.7)) == pytest.approx(
        1.0, abs=1e-14)


def test_energy_expectation_matches_matrix_form():
    rng = np.random.default_rng(19)
    for _ in range(20):
        n_max = int(rng.integers(0, 10))
        p = make_params(rng.uniform(0.5, 10), rng.uniform(0.5, 10),
                        rng.normal() + 1j * rng.normal())
        st = random_state(rng, n_max)
        psi = st.to_vector()
        ref = float(np.real(np.vdot(psi, build_hamiltonian(p, n_max).matrix @ psi)))
        assert energy_expectation(st, p) == pytest.approx(ref, abs=1e-12 * max(1, abs(ref)))


def test_unwrap_phase_cases():
    theta = 2.2
    series = np.full(32, np.exp(1j * theta))
    assert np.allclose(unwrap_phase(series), theta, atol=1e-15)
    t = np.linspace(0, 10, 400)
    spiral = np.exp(-1j * 3.0 * t)
    phases = unwrap_phase(spiral)
    slope = np.polyfit(t, phases, 1)[0]
    assert slope == pytest.approx(-3.0, abs=1e-9)
    assert np.max(np.abs(np.diff(phases))) < math.pi
    with pytest.raises(ValueError):
        unwrap_phase(np.array([1.0, 0.0, 1.0], complex))


def test_sinusoid_fit_recovers_exact_cosine():
    t = np.linspace(0.0, 20.0, 2048)
    y = 0.3 + 1.7 * np.cos(3.7 * t + 0.4)
    fit = sinusoid_deviation(t, y)
    assert fit.score < 1e-6
    assert fit.omega == pytest.approx(3.7, abs=1e-6)
    assert fit.amplitude == pytest.approx(1.7, abs=1e-6)
    assert fit.offset == pytest.approx(0.3, abs=1e-6)


def test_sinusoid_fit_constant_signal():
    t = np.linspace(0.0, 5.0, 64)
    fit = sinusoid_deviation(t, np.full(64, 2.5))
    assert fit.amplitude == pytest.approx(0.0, abs=1e-12)
    assert fit.offset == pytest.approx(2.5)
    assert fit.score == pytest.approx(0.0, abs=1e-12)


def test_sinusoid_fit_two_tone_scores_high():
    t = np.linspace(0.0, 40.0, 4096)
    y = np.cos(1.0 * t) + np.cos(math.sqrt(2) * 2.3 * t)
    fit = sinusoid_deviation(t, y)
    assert fit.score > 0.3


def test_sinusoid_fit_input_validation():
    t = np.linspace(0, 1, 8)
    with pytest.raises(ValueError):
        sinusoid_deviation(t, np.zeros(8))
    t = np.linspace(0, 1, 32) ** 2
    with pytest.raises(ValueError):
        sinusoid_deviation(t, np.ones(32))
    t = np.linspace(0, 1, 32)
    with pytest.raises(ValueError):
        sinusoid_deviation(t, np.zeros(32))
