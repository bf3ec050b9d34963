"""Closed-form rotating-wave (excitation-conserving) reference dynamics.

Deleting the excitation-nonconserving couplings from the amplitude
equations leaves independent 2x2 blocks pairing (b_n, c_{n+1}) through the
Hermitian matrix

    [[w_0 + n w_l,        -i g sqrt(n+1)],
     [+i conj(g) sqrt(n+1),  (n+1) w_l ]]

plus an uncoupled constant c_0 and, on a truncated basis, a top-level
b_{n_max} evolving by its diagonal phase alone. Each block is evolved
exactly, in the lab frame, so amplitudes compare directly against the full
backends. This is the weak-coupling validation target: the full model must
approach it when the coupling is far below both frequencies.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fock import assemble_channels
from .model import FockAmplitudes, ModelParams, Trajectory

__all__ = [
    "RwaBlock",
    "rwa_block",
    "rwa_block_evolve",
    "rwa_evolve",
    "rwa_excited_probability",
    "simulate_rwa",
]


@dataclass(frozen=True)
class RwaBlock:
    """One excitation manifold: photon index n couples (b_n, c_{n+1})."""

    n: int
    rabi: float


def rwa_block(n, params: ModelParams) -> RwaBlock:
    """Generalized flopping frequency sqrt((delta/2)^2 + |g|^2 (n+1))."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    return RwaBlock(n=n, rabi=math.hypot(params.delta / 2.0,
                                         abs(params.g) * math.sqrt(n + 1.0)))


def rwa_block_evolve(n, b_init, c_init, params: ModelParams, t):
    """Exact lab-frame evolution of one block for time ``t``.

    Returns (b_n(t), c_{n+1}(t)). The 2x2 propagator is
    exp(-i avg t) (cos(Omega t) I - i sin(Omega t)/Omega K) with K the
    traceless part of the block matrix; |b|^2 + |c|^2 is preserved exactly.
    """
    n = int(n)
    t = float(t)
    b = complex(b_init)
    c = complex(c_init)
    avg = 0.5 * (params.omega0 + (2 * n + 1) * params.omega_lambda)
    d = 0.5 * params.delta
    m = -1j * params.g * math.sqrt(n + 1.0)
    omega = math.hypot(d, abs(m))
    phase = np.exp(-1j * avg * t)
    cos_t = math.cos(omega * t)
    sinc_t = t if omega == 0.0 else math.sin(omega * t) / omega
    b_t = phase * (cos_t * b - 1j * sinc_t * (d * b + m * c))
    c_t = phase * (cos_t * c - 1j * sinc_t * (m.conjugate() * b - d * c))
    return b_t, c_t


def rwa_evolve(initial: FockAmplitudes, params: ModelParams,
               t) -> FockAmplitudes:
    """Assemble the full truncated state at time ``t`` from block evolutions."""
    n_max = initial.n_max
    b = np.zeros(n_max + 1, dtype=np.complex128)
    c = np.zeros(n_max + 1, dtype=np.complex128)
    c[0] = initial.c[0]  # uncoupled, zero diagonal: constant
    for n in range(n_max):
        b[n], c[n + 1] = rwa_block_evolve(n, initial.b[n], initial.c[n + 1],
                                          params, t)
    # top excited level loses its partner to the cutoff: diagonal phase only
    b[n_max] = initial.b[n_max] * np.exp(
        -1j * (params.omega0 + n_max * params.omega_lambda) * float(t))
    return FockAmplitudes(n_max=n_max, b=b, c=c)


def rwa_excited_probability(initial: FockAmplitudes, params: ModelParams,
                            t) -> float:
    """P_e(t) assembled from the independent block evolutions."""
    state = rwa_evolve(initial, params, t)
    return float(np.sum(np.abs(state.b) ** 2))


def simulate_rwa(initial: FockAmplitudes, params: ModelParams, t_end,
                 sample_interval=None, times=None) -> Trajectory:
    """Sample the closed-form evolution on a uniform grid (or ``times``)."""
    if times is None:
        if t_end < 0:
            raise ValueError("t_end must be >= 0")
        if sample_interval is None:
            sample_interval = t_end / 1000.0 if t_end > 0 else 0.0
        if t_end == 0 or sample_interval <= 0:
            times = np.array([0.0])
        else:
            n_samples = int(np.floor(t_end / sample_interval + 1e-9))
            times = np.unique(np.append(np.arange(n_samples + 1)
                                        * sample_interval, t_end))
    else:
        times = np.asarray(times, dtype=float)
    states = [rwa_evolve(initial, params, t) for t in times]
    channels = assemble_channels(states, params)
    return Trajectory(times=times, states=states, channels=channels)
