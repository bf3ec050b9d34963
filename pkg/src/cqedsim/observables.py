"""Derived quantities and signal diagnostics.

Includes the probability/expectation reductions of a Fock amplitude state
and the single-sinusoid deviation metric used to classify trajectories as
sinusoidal (free-running) or not.
"""

import math
from dataclasses import dataclass

import numpy as np

from .model import FockAmplitudes, ModelParams

__all__ = [
    "SinusoidFit",
    "excited_probability",
    "field_expectation",
    "mean_photon_number",
    "excitation_number",
    "energy_expectation",
    "unwrap_phase",
    "sinusoid_deviation",
]


def excited_probability(state: FockAmplitudes) -> float:
    """Probability of finding the atom excited, sum |b_n|^2."""
    return float(np.sum(np.abs(state.b) ** 2))


def field_expectation(state: FockAmplitudes) -> complex:
    """Exact <a> on the entangled state.

    <a> = sum_n sqrt(n+1) (conj(b_n) b_{n+1} + conj(c_n) c_{n+1});
    zero for any single basis state.
    """
    sq = np.sqrt(np.arange(1, state.n_max + 1, dtype=float))
    b, c = state.b, state.c
    return complex(np.sum(sq * (np.conj(b[:-1]) * b[1:] + np.conj(c[:-1]) * c[1:])))


def mean_photon_number(state: FockAmplitudes) -> float:
    """sum_n n (|b_n|^2 + |c_n|^2)."""
    n = np.arange(state.n_max + 1, dtype=float)
    return float(np.sum(n * (np.abs(state.b) ** 2 + np.abs(state.c) ** 2)))


def excitation_number(state: FockAmplitudes) -> float:
    """Photon number plus atomic excitation; conserved when the
    excitation-nonconserving couplings are switched off."""
    return mean_photon_number(state) + excited_probability(state)


def energy_expectation(state: FockAmplitudes, params: ModelParams) -> float:
    """<H> computed by explicit summation over the amplitude stencil.

    Matches the dense-matrix quadratic form of the spectral backend to
    rounding; the imaginary residue is asserted tiny and discarded.
    """
    n = np.arange(state.n_max + 1, dtype=float)
    b, c = state.b, state.c
    diag = np.sum((params.omega0 + n * params.omega_lambda) * np.abs(b) ** 2)
    diag += np.sum(n * params.omega_lambda * np.abs(c) ** 2)
    # coupling block X_{n,n+1} = -i g sqrt(n+1), X_{n,n-1} = +i conj(g) sqrt(n);
    # both cross terms b^H X c and c^H X b are summed explicitly so hermiticity
    # shows up as a vanishing imaginary residue rather than being assumed.
    g = params.g
    sq = np.sqrt(np.arange(1, state.n_max + 1, dtype=float))
    bxc = np.sum(np.conj(b[:-1]) * (-1j * g) * sq * c[1:])
    bxc += np.sum(np.conj(b[1:]) * (1j * np.conj(g)) * sq * c[:-1])
    cxb = np.sum(np.conj(c[:-1]) * (-1j * g) * sq * b[1:])
    cxb += np.sum(np.conj(c[1:]) * (1j * np.conj(g)) * sq * b[:-1])
    value = complex(diag + bxc + cxb)
    assert abs(value.imag) < 1e-12 * max(1.0, abs(value)), \
        "energy expectation acquired an imaginary part"
    return value.real


def unwrap_phase(series) -> np.ndarray:
    """Principal arguments adjusted by 2*pi steps so successive differences
    stay in (-pi, pi].

    Raises
    ------
    ValueError
        If any sample is exactly zero (its phase is undefined).
    """
    z = np.asarray(series, dtype=complex)
    if np.any(z == 0):
        raise ValueError("phase undefined: series contains an exact zero")
    return np.unwrap(np.angle(z))


@dataclass(frozen=True)
class SinusoidFit:
    """Best fit of offset + amplitude*cos(omega*t + phase) to a real series."""

    offset: float
    amplitude: float
    omega: float
    phase: float
    residual_rms: float
    signal_rms: float

    @property
    def score(self) -> float:
        """residual_rms / signal_rms, the deviation-from-sinusoid measure."""
        return self.residual_rms / self.signal_rms


def _linear_fit(t, y, omega):
    """Least squares for (offset, A cos, A sin) at fixed omega; omega <= 0
    degenerates to the constant fit."""
    n = len(t)
    if omega <= 0.0:
        offset = float(np.mean(y))
        resid = y - offset
        return float(np.sqrt(np.mean(resid ** 2))), (offset, 0.0, 0.0)
    design = np.column_stack([np.ones(n), np.cos(omega * t), np.sin(omega * t)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return float(np.sqrt(np.mean(resid ** 2))), tuple(float(v) for v in coef)


def sinusoid_deviation(times, signal) -> SinusoidFit:
    """Fit a single sinusoid and report the relative residual.

    The frequency comes from the DFT peak of the mean-removed signal,
    refined by two grid zooms and a golden-section search; offset,
    amplitude and phase are linear least squares at each candidate
    frequency. A pure-constant fit competes with the oscillatory one.

    Parameters
    ----------
    times : array
        At least 16 uniformly spaced samples. Spacing jitter up to 10% of
        the mean is tolerated (integrators sample at accepted steps); the
        frequency refinement is least-squares based and exact on any grid,
        only the DFT seed assumes near-uniformity.
    signal : array
        Real samples, same length.

    Raises
    ------
    ValueError
        On too few samples, non-uniform spacing, or a degenerate signal
        (RMS below 1e-14).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(signal, dtype=float)
    if t.ndim != 1 or t.shape != y.shape:
        raise ValueError("times and signal must be 1-D arrays of equal length")
    n = len(t)
    if n < 16:
        raise ValueError(f"need at least 16 samples, got {n}")
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if dt <= 0 or np.max(np.abs(steps - dt)) > 0.10 * dt:
        raise ValueError("samples must be uniformly spaced")
    signal_rms = float(np.sqrt(np.mean(y ** 2)))
    if signal_rms < 1e-14:
        raise ValueError("degenerate signal: RMS below 1e-14")

    spectrum = np.abs(np.fft.rfft(y - np.mean(y)))
    peak = int(np.argmax(spectrum[1:]) + 1) if len(spectrum) > 1 else 1
    w0 = 2.0 * math.pi * peak / (n * dt)
    half = 2.0 * math.pi / (n * dt)
    lo, hi = max(w0 - half, 1e-12), w0 + half
    for _ in range(2):
        grid = np.linspace(lo, hi, 41)
        resids = [_linear_fit(t, y, w)[0] for w in grid]
        best = int(np.argmin(resids))
        lo = grid[max(0, best - 1)]
        hi = grid[min(len(grid) - 1, best + 1)]
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - golden * (b - a)
    d = a + golden * (b - a)
    fc = _linear_fit(t, y, c)[0]
    fd = _linear_fit(t, y, d)[0]
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - golden * (b - a)
            fc = _linear_fit(t, y, c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + golden * (b - a)
            fd = _linear_fit(t, y, d)[0]
    omega = 0.5 * (a + b)
    resid, (offset, cc, cs) = _linear_fit(t, y, omega)
    resid_const, (offset_const, _, _) = _linear_fit(t, y, 0.0)
    if resid_const <= resid:
        return SinusoidFit(offset=offset_const, amplitude=0.0, omega=0.0,
                           phase=0.0, residual_rms=resid_const,
                           signal_rms=signal_rms)
    amplitude = math.hypot(cc, cs)
    phase = math.atan2(-cs, cc)
    return SinusoidFit(offset=offset, amplitude=amplitude, omega=omega,
                       phase=phase, residual_rms=resid, signal_rms=signal_rms)
