import math

import numpy as np
import pytest

from cqedsim.model import coherent_amplitudes, fock_basis_state, make_params
from cqedsim.rwa import (rwa_block, rwa_block_evolve, rwa_evolve,
                         rwa_excited_probability, simulate_rwa)


def test_block_frequency_bounds():
    p = make_params(10, 8, 0.5)
    for n in range(6):
        block = rwa_block(n, p)
        assert block.rabi >= abs(p.delta) / 2.0
        assert block.rabi >= abs(p.g) * math.sqrt(n + 1.0)
        assert block.rabi == pytest.approx(
            math.sqrt((p.delta / 2) ** 2 + abs(p.g) ** 2 * (n + 1)))


def test_block_identity_at_t0():
    b, c = rwa_block_evolve(2, 0.3 + 0.1j, -0.2j, make_params(5, 4, 1.0), 0.0)
    assert b == pytest.approx(0.3 + 0.1j, abs=1e-15)
    assert c == pytest.approx(-0.2j, abs=1e-15)


def test_resonant_vacuum_flop():
    g = 0.7
    p = make_params(10, 10, g)
    b, c = rwa_block_evolve(0, 1.0, 0.0, p, math.pi / (2 * g))
    assert abs(b) ** 2 == pytest.approx(0.0, abs=1e-15)
    assert abs(c) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_block_unitarity_random_inputs():
    rng = np.random.default_rng(13)
    p = make_params(3.0, 2.0, 0.4 + 0.9j)
    for _ in range(50):
        b0 = rng.normal() + 1j * rng.normal()
        c0 = rng.normal() + 1j * rng.normal()
        t = rng.uniform(-5, 5)
        n = int(rng.integers(0, 8))
        b, c = rwa_block_evolve(n, b0, c0, p, t)
        assert abs(b) ** 2 + abs(c) ** 2 == pytest.approx(
            abs(b0) ** 2 + abs(c0) ** 2, rel=1e-12)


def test_detuned_minimum_survival():
    # for the excited vacuum start min P_e = 1 - |g|^2 / rabi^2
    p = make_params(10, 9, 0.3)
    block = rwa_block(0, p)
    ts = np.linspace(0, 4 * math.pi / block.rabi, 4001)
    pe = np.array([abs(rwa_block_evolve(0, 1.0, 0.0, p, t)[0]) ** 2
                   for t in ts])
    assert pe.min() == pytest.approx(1.0 - abs(p.g) ** 2 / block.rabi ** 2,
                                     abs=1e-6)


def test_excited_probability_resonant_cosine():
    g = 1.0
    p = make_params(100, 100, g)
    st = fock_basis_state(0, 10, True)
    for t in np.linspace(0, 3 * math.pi, 40):
        assert rwa_excited_probability(st, p, t) == pytest.approx(
            math.cos(g * t) ** 2, abs=1e-12)


def test_ground_vacuum_is_dark():
    p = make_params(5, 5, 0.8)
    st = fock_basis_state(0, 6, False)
    for t in (0.0, 1.3, 7.7):
        assert rwa_excited_probability(st, p, t) == 0.0
        evolved = rwa_evolve(st, p, t)
        assert evolved.c[0] == st.c[0]  # uncoupled amplitude is constant


def test_collapse_and_revival_timing():
    # revival of the coherent-field oscillation near 2 pi |alpha| / g,
    # located by brute-force peak search on the assembled series
    alpha_c, g = 3.0, 1.0
    p = make_params(100, 100, g)
    st = coherent_amplitudes(alpha_c, 60, True)
    ts = np.linspace(10.0, 26.0, 3201)
    pe = np.array([rwa_excited_probability(st, p, t) for t in ts])
    t_revival_expected = 2 * math.pi * alpha_c / g
    t_peak = ts[int(np.argmax(pe))]
    assert abs(t_peak - t_revival_expected) <= 0.15 * t_revival_expected
    # collapsed region is quiet by comparison
    ts_c = np.linspace(4.0, 8.0, 801)
    pe_c = np.array([rwa_excited_probability(st, p, t) for t in ts_c])
    assert pe_c.max() - pe_c.min() < 0.05
    assert pe.max() - pe.min() > 0.5


def test_evolve_preserves_norm():
    rng = np.random.default_rng(31)
    p = make_params(4, 3, 0.2 + 0.6j)
    vec = rng.normal(size=22) + 1j * rng.normal(size=22)
    vec /= np.linalg.norm(vec)
    from cqedsim.model import FockAmplitudes
    st = FockAmplitudes.from_vector(vec, 10)
    for t in (0.3, 2.9, 11.0):
        evolved = rwa_evolve(st, p, t)
        assert np.linalg.norm(evolved.to_vector()) == pytest.approx(1.0,
                                                                    abs=1e-12)


def test_simulate_rwa_grid():
    p = make_params(10, 10, 0.5)
    traj = simulate_rwa(fock_basis_state(0, 8, True), p, 5.0,
                        sample_interval=0.25)
    assert traj.times[0] == 0.0 and traj.times[-1] == 5.0
    assert np.max(np.abs(traj.channel("norm2") - 1.0)) < 1e-12
