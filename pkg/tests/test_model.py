import math

import numpy as np
import pytest

from cqedsim.errors import TruncationError
from cqedsim.model import (FockAmplitudes, Trajectory, coherent_amplitudes,
                           fock_basis_state, make_params, norm_squared,
                           product_to_meanfield)


def test_make_params_known_regimes():
    p = make_params(10, 10, 0.1)
    assert p.omega0 == 10.0 and p.omega_lambda == 10.0 and p.g == 0.1
    assert p.delta == 0.0 and p.gamma_sum == 20.0
    p = make_params(10, 8, 0.1)
    assert p.delta == pytest.approx(2.0)
    assert p.gamma_sum == pytest.approx(18.0)


def test_make_params_rejects_bad_input():
    with pytest.raises(ValueError):
        make_params(10, -1, 0.1)
    with pytest.raises(ValueError):
        make_params(0, 1, 0.1)
    with pytest.raises(ValueError):
        make_params(float("nan"), 1, 0.1)
    with pytest.raises(ValueError):
        make_params(1, 1, complex(float("inf"), 0))


def test_basis_state_examples():
    st = fock_basis_state(0, 10, True)
    assert st.b[0] == 1 and np.all(st.b[1:] == 0) and np.all(st.c == 0)
    assert norm_squared(st) == 1.0
    st = fock_basis_state(3, 10, False)
    assert st.c[3] == 1 and np.sum(np.abs(st.b)) == 0
    with pytest.raises(IndexError):
        fock_basis_state(11, 10, True)


def test_basis_state_idempotent_under_renormalization():
    st = fock_basis_state(4, 6, True)
    renorm = st.to_vector() / math.sqrt(norm_squared(st))
    assert np.array_equal(renorm, st.to_vector())


def test_coherent_vacuum_is_basis():
    st = coherent_amplitudes(0.0, 20, True)
    assert st.b[0] == 1.0 and np.all(st.b[1:] == 0)


def test_coherent_against_factorial_formula():
    # independent oracle: closed form with explicit factorials
    alpha = 1.0
    st = coherent_amplitudes(alpha, 20, True)
    assert abs(st.b[0]) == pytest.approx(math.exp(-0.5), abs=1e-13)
    for n in range(21):
        expected = (math.exp(-0.5 * abs(alpha) ** 2) * alpha ** n
                    / math.sqrt(math.factorial(n)))
        assert st.b[n] == pytest.approx(expected, abs=1e-13)
    # brute-force sum of |amplitudes|^2 returns unit norm
    assert norm_squared(st) == pytest.approx(1.0, abs=1e-12)


def test_coherent_complex_amplitude_normalized():
    for alpha in (0.5 + 0.5j, 2.0j, -1.3 + 0.4j):
        st = coherent_amplitudes(alpha, 40, False)
        assert norm_squared(st) == pytest.approx(1.0, abs=1e-12)


def test_coherent_truncation_strict():
    # Poisson tail beyond n=5 at mean 9, by direct summation
    mean = 9.0
    kept = sum(math.exp(-mean) * mean ** n / math.factorial(n)
               for n in range(6))
    assert 1.0 - kept > 1e-12
    with pytest.raises(TruncationError):
        coherent_amplitudes(3.0, 5, True)
    lenient = coherent_amplitudes(3.0, 5, True, strict=False)
    assert norm_squared(lenient) == pytest.approx(1.0, abs=1e-12)


def test_norm_squared_simple_cases():
    assert norm_squared(fock_basis_state(2, 4, True)) == 1.0
    zeros = FockAmplitudes(n_max=3, b=np.zeros(4, complex),
                           c=np.zeros(4, complex))
    assert norm_squared(zeros) == 0.0
    half = 1.0 / math.sqrt(2.0)
    both = FockAmplitudes(n_max=0, b=np.array([half], complex),
                          c=np.array([half], complex))
    assert norm_squared(both) == pytest.approx(1.0, abs=1e-15)


def test_product_to_meanfield_examples():
    st = product_to_meanfield(1, 0, 0)
    assert st.alpha == 0 and st.beta == 0 and st.s == 1.0
    half = 1.0 / math.sqrt(2.0)
    st = product_to_meanfield(half, half, 1j)
    assert st.alpha == 1j
    assert st.beta == pytest.approx(0.5, abs=1e-15)
    assert st.s == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        product_to_meanfield(0.9, 0.9, 0)


def test_product_to_meanfield_constraint_tight():
    rng = np.random.default_rng(7)
    eps = np.finfo(float).eps
    for _ in range(1000):
        b = rng.normal() + 1j * rng.normal()
        c = rng.normal() + 1j * rng.normal()
        nrm = math.sqrt(abs(b) ** 2 + abs(c) ** 2)
        st = product_to_meanfield(b / nrm, c / nrm, 0)
        assert st.constraint_defect() <= 4 * eps


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 0.0]), states=[1, 2])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=[1])
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=[1, 2],
                   channels={"x": np.zeros(3)})
    traj = Trajectory(times=np.array([0.0, 1.0]), states=[1, 2],
                      channels={"x": np.zeros(2)})
    with pytest.raises(KeyError):
        traj.channel("missing")
