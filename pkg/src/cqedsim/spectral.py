"""Dense-matrix ground truth: exact propagation via eigendecomposition.

Builds the Hermitian Hamiltonian on the truncated basis ordered
(e,0)..(e,n_max),(g,0)..(g,n_max):

    diagonal      w_0 + n w_l   (excited block),   n w_l   (ground block)
    coupling      <n|X|m> with X = -i (g a - conj(g) a^dagger):
                  -i g sqrt(n+1) at m = n+1,  +i conj(g) sqrt(n) at m = n-1

Propagation applies V exp(-i L t) V^H to the initial vector, which is exact
for any t. This path shares no code with the stencil integrator, so their
agreement is a genuine cross-check.
"""

from dataclasses import dataclass, field

import numpy as np

from .fock import assemble_channels
from .model import FockAmplitudes, ModelParams, Trajectory

__all__ = [
    "HamiltonianMatrix",
    "SpectralDecomposition",
    "build_hamiltonian",
    "hermiticity_defect",
    "decompose",
    "propagate",
    "simulate_oracle",
]


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense Hermitian matrix plus the cutoff it was built for."""

    n_max: int
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    n_max: int
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)


def build_hamiltonian(params: ModelParams, n_max) -> HamiltonianMatrix:
    """Assemble the dense Hamiltonian at cutoff ``n_max``.

    Conjugate entry pairs are written explicitly, making hermiticity exact
    by construction (checked by :func:`hermiticity_defect`).
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    m = n_max + 1
    h = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    n = np.arange(m, dtype=float)
    idx = np.arange(m)
    h[idx, idx] = params.omega0 + n * params.omega_lambda
    h[m + idx, m + idx] = n * params.omega_lambda
    g = complex(params.g)
    for i in range(n_max):
        up = -1j * g * np.sqrt(i + 1.0)        # <i|X|i+1>
        dn = 1j * g.conjugate() * np.sqrt(i + 1.0)  # <i+1|X|i>
        h[i, m + i + 1] = up
        h[m + i + 1, i] = up.conjugate()
        h[i + 1, m + i] = dn
        h[m + i, i + 1] = dn.conjugate()
    return HamiltonianMatrix(n_max=n_max, matrix=h)


def hermiticity_defect(h: HamiltonianMatrix) -> float:
    """max |H_ij - conj(H_ji)|."""
    return float(np.max(np.abs(h.matrix - h.matrix.conj().T)))


def decompose(h: HamiltonianMatrix) -> SpectralDecomposition:
    """Eigendecomposition of the Hermitian matrix (LAPACK ``eigh``)."""
    eigenvalues, eigenvectors = np.linalg.eigh(h.matrix)
    return SpectralDecomposition(n_max=h.n_max, eigenvalues=eigenvalues,
                                 eigenvectors=eigenvectors)


def propagate(decomp: SpectralDecomposition, initial: FockAmplitudes,
              t) -> FockAmplitudes:
    """Exact state at time ``t``: V exp(-i L t) V^H psi0."""
    if initial.n_max != decomp.n_max:
        raise ValueError(
            f"dimension mismatch: state n_max = {initial.n_max}, "
            f"decomposition n_max = {decomp.n_max}")
    coef = decomp.eigenvectors.conj().T @ initial.to_vector()
    psi = decomp.eigenvectors @ (np.exp(-1j * decomp.eigenvalues * float(t)) * coef)
    return FockAmplitudes.from_vector(psi, decomp.n_max)


def simulate_oracle(initial: FockAmplitudes, params: ModelParams, t_end,
                    sample_interval=None, times=None) -> Trajectory:
    """Sample the exact evolution on a uniform grid (or explicit ``times``).

    Produces the same channel set as the stencil integrator, so outputs are
    directly comparable.
    """
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
    decomp = decompose(build_hamiltonian(params, initial.n_max))
    coef = decomp.eigenvectors.conj().T @ initial.to_vector()
    states = []
    for t in times:
        psi = decomp.eigenvectors @ (np.exp(-1j * decomp.eigenvalues * t) * coef)
        states.append(FockAmplitudes.from_vector(psi, initial.n_max))
    channels = assemble_channels(states, params)
    return Trajectory(times=times, states=states, channels=channels)
