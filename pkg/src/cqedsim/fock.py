"""Exact entangled dynamics on a truncated photon-number basis.

Autonomous amplitude equations, with n running over retained photon
numbers and out-of-range couplings dropped (hard truncation):

    db_n/dt = -i (w_0 + n w_l) b_n - g sqrt(n+1) c_{n+1} + conj(g) sqrt(n) c_{n-1}
    dc_n/dt = -i  n w_l        c_n - g sqrt(n+1) b_{n+1} + conj(g) sqrt(n) b_{n-1}

Hard truncation drops the boundary coupling symmetrically, so the truncated
system conserves the norm exactly; cutoff error is visible purely as tail
mass. The same stencil equals -i H psi for the dense Hamiltonian built by
the spectral backend, which the tests cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NormDriftError, ResourceLimitError, TruncationError
from .integrate import (StepControl, integrate_adaptive, integrate_fixed,
                        snap_dt_to_interval)
from .model import FockAmplitudes, ModelParams, Trajectory
from .observables import (energy_expectation, excited_probability,
                          field_expectation, mean_photon_number)

__all__ = [
    "FockDerivative",
    "fock_rhs",
    "tail_mass",
    "simulate_fock",
    "auto_truncate",
    "default_n_max_basis",
    "default_n_max_coherent",
    "default_step_control",
    "assemble_channels",
    "STEPS_PER_PERIOD",
]

STEPS_PER_PERIOD = 500
NORM_DRIFT_LIMIT = 1e-6
TAIL_LEVELS = 3  # top levels watched by the running truncation check


@dataclass(frozen=True)
class FockDerivative:
    """Time derivatives of the amplitude vectors."""

    d_b: np.ndarray
    d_c: np.ndarray


class _Stencil:
    """Precomputed coefficient arrays for one (params, n_max) pair.

    Operates on the stacked complex vector psi = [b, c]. ``antirotating``
    False drops the excitation-nonconserving couplings (diagnostic toggle
    used by the rotating-wave comparisons)."""

    def __init__(self, params: ModelParams, n_max: int, antirotating=True):
        n = np.arange(n_max + 1, dtype=float)
        self.n_amp = n_max + 1
        self.diag_b = -1j * (params.omega0 + n * params.omega_lambda)
        self.diag_c = -1j * (n * params.omega_lambda)
        self.sq_up = np.sqrt(n + 1.0)[:-1]     # sqrt(n+1) for n = 0..n_max-1
        self.sq_dn = np.sqrt(n)[1:]            # sqrt(n)   for n = 1..n_max
        self.g = complex(params.g)
        self.gc = self.g.conjugate()
        self.antirotating = antirotating

    def apply(self, psi):
        m = self.n_amp
        b = psi[:m]
        c = psi[m:]
        db = self.diag_b * b
        dc = self.diag_c * c
        db[:-1] -= self.g * self.sq_up * c[1:]
        dc[1:] += self.gc * self.sq_dn * b[:-1]
        if self.antirotating:
            db[1:] += self.gc * self.sq_dn * c[:-1]
            dc[:-1] -= self.g * self.sq_up * b[1:]
        return np.concatenate([db, dc])

    def flat_rhs(self):
        def rhs(y, t):
            return self.apply(y.view(np.complex128)).view(np.float64)
        return rhs


def fock_rhs(state: FockAmplitudes, params: ModelParams,
             antirotating=True) -> FockDerivative:
    """Evaluate the amplitude equations for one state."""
    d = _Stencil(params, state.n_max, antirotating).apply(state.to_vector())
    m = state.n_max + 1
    return FockDerivative(d_b=d[:m], d_c=d[m:])


def tail_mass(state: FockAmplitudes, k) -> float:
    """Probability held by the top ``k`` retained photon levels."""
    k = int(k)
    if not 1 <= k <= state.n_max + 1:
        raise IndexError(f"k = {k} outside [1, {state.n_max + 1}]")
    return float(np.sum(np.abs(state.b[-k:]) ** 2)
                 + np.sum(np.abs(state.c[-k:]) ** 2))


def default_n_max_basis(n) -> int:
    """Cutoff default for a photon-number basis start."""
    return max(20, int(n) + 10)


def default_n_max_coherent(alpha_c) -> int:
    """Cutoff default for a coherent start: 4 * ceil(|alpha|^2) + 20."""
    return 4 * math.ceil(abs(complex(alpha_c)) ** 2) + 20


def _populated_quantile(state: FockAmplitudes, mass_tol=1e-6) -> int:
    """Smallest level below which all but ``mass_tol`` of the mass sits."""
    weights = np.abs(state.b) ** 2 + np.abs(state.c) ** 2
    total = float(np.sum(weights))
    if total == 0.0:
        return 0
    acc = 0.0
    for n, w in enumerate(weights):
        acc += float(w)
        if acc >= total * (1.0 - mass_tol):
            return n
    return state.n_max


def default_step_control(params: ModelParams, n_max, t_end,
                         initial: FockAmplitudes = None,
                         sample_interval=None) -> StepControl:
    """Fixed-step control resolving both the carrier and the fastest
    initially populated level.

    The populated-level term matters for broad initial distributions
    (coherent fields at large carrier frequency), whose occupied levels
    rotate at w_0 + n w_l even when the coupling is slow.
    """
    g_abs = abs(params.g)
    w_fast = max(params.omega0, params.omega_lambda,
                 2.0 * g_abs * math.sqrt(n_max + 1.0))
    if initial is not None:
        n_pop = _populated_quantile(initial)
        w_fast = max(w_fast, params.omega0 + n_pop * params.omega_lambda
                     + 2.0 * g_abs * math.sqrt(n_pop + 1.0))
    dt = (2.0 * math.pi / w_fast) / STEPS_PER_PERIOD
    if sample_interval is None:
        sample_interval = t_end / 1000.0 if t_end > 0 else 0.0
    dt = snap_dt_to_interval(dt, sample_interval)
    return StepControl(mode="fixed", dt=dt, sample_interval=sample_interval)


def assemble_channels(states, params: ModelParams) -> dict:
    """Observable channels shared by all Fock-state producing backends."""
    k = min(TAIL_LEVELS, states[0].n_max + 1)
    return {
        "pe": np.array([excited_probability(st) for st in states]),
        "nbar": np.array([mean_photon_number(st) for st in states]),
        "norm2": np.array([float(np.sum(np.abs(st.b) ** 2)
                                 + np.sum(np.abs(st.c) ** 2))
                           for st in states]),
        "energy": np.array([energy_expectation(st, params) for st in states]),
        "alpha": np.array([field_expectation(st) for st in states]),
        "tail_mass": np.array([tail_mass(st, k) for st in states]),
    }


def simulate_fock(initial: FockAmplitudes, params: ModelParams, t_end,
                  control: StepControl = None, tail_tol=1e-10,
                  antirotating=True) -> Trajectory:
    """Integrate the truncated amplitude equations.

    Parameters
    ----------
    initial : FockAmplitudes
        Normalized within 1e-10.
    control : StepControl, optional
        Defaults to fixed RK4 from :func:`default_step_control`.
    tail_tol : float
        Bound on the top-level probability at every sample; crossing it
        raises :class:`TruncationError` (n_max too small for the run).
        Pass ``math.inf`` to disable (used by the truncation search).
    antirotating : bool
        Diagnostic toggle; False removes the excitation-nonconserving
        couplings so the dynamics reduces to the rotating-wave model.

    Channels: pe, nbar, norm2, energy, alpha (complex), tail_mass.

    Raises
    ------
    NormDriftError
        If |norm^2 - 1| exceeds 1e-6 at any sample (step size too coarse).
    """
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    nrm = float(np.sum(np.abs(initial.b) ** 2) + np.sum(np.abs(initial.c) ** 2))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"initial state norm^2 = {nrm!r}, expected 1")
    n_max = initial.n_max
    if control is None:
        control = default_step_control(params, n_max, t_end, initial)
    stencil = _Stencil(params, n_max, antirotating)
    y0 = initial.to_vector().view(np.float64)
    if control.mode == "fixed":
        raw = integrate_fixed(stencil.flat_rhs(), y0, 0.0, t_end, control)
    else:
        raw = integrate_adaptive(stencil.flat_rhs(), y0, 0.0, t_end, control)
    states = [FockAmplitudes.from_vector(y.view(np.complex128), n_max)
              for y in raw.states]
    channels = assemble_channels(states, params)
    worst_norm = float(np.max(np.abs(channels["norm2"] - 1.0)))
    if worst_norm > NORM_DRIFT_LIMIT:
        raise NormDriftError(
            f"norm^2 drifted by {worst_norm:.3e}; decrease the step size")
    worst_tail = float(np.max(channels["tail_mass"]))
    if worst_tail > tail_tol:
        t_bad = float(raw.times[int(np.argmax(channels["tail_mass"]))])
        raise TruncationError(
            f"tail mass reached {worst_tail:.3e} at t = {t_bad:g} "
            f"(allowed {tail_tol:.1e}); increase n_max")
    return Trajectory(times=raw.times, states=states, channels=channels,
                      meta=dict(raw.meta))


def auto_truncate(make_initial, params: ModelParams, t_end, tol,
                  start=2, ceiling=512) -> int:
    """Doubling search for a photon-number cutoff.

    Returns the smallest n_max from the doubling sequence such that
    re-simulating with n_max and with 2*n_max changes the excited-state
    probability by less than ``tol`` in sup norm over [0, t_end].

    Parameters
    ----------
    make_initial : callable
        ``make_initial(n_max) -> FockAmplitudes`` rebuilding the initial
        state at a given cutoff (truncation checks should be lenient here).
    tol : float
        Sup-norm convergence threshold on P_e; must be > 0.

    Raises
    ------
    ResourceLimitError
        If no cutoff up to ``ceiling`` converges.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if t_end <= 0:
        raise ValueError("t_end must be > 0")
    n = max(2, int(start))
    sample_interval = t_end / 256.0
    while n <= ceiling:
        fine_initial = make_initial(2 * n)
        # shared step size and sample grid so the two runs align exactly
        control = default_step_control(params, 2 * n, t_end, fine_initial,
                                       sample_interval=sample_interval)
        coarse = simulate_fock(make_initial(n), params, t_end,
                               control=control, tail_tol=math.inf)
        fine = simulate_fock(fine_initial, params, t_end,
                             control=control, tail_tol=math.inf)
        diff = float(np.max(np.abs(coarse.channel("pe") - fine.channel("pe"))))
        if diff < tol:
            return n
        n *= 2
    raise ResourceLimitError(
        f"truncation search exceeded ceiling n_max = {ceiling}")
