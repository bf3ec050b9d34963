"""Core domain types, initial-state constructors and normalization helpers.

Everything here is shared by the dynamics backends. Units are dimensionless
angular frequencies (hbar = 1 throughout); all types are immutable after
construction and all functions are pure.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import TruncationError

__all__ = [
    "ModelParams",
    "MeanFieldState",
    "FockAmplitudes",
    "Trajectory",
    "make_params",
    "fock_basis_state",
    "coherent_amplitudes",
    "norm_squared",
    "product_to_meanfield",
    "DEFAULT_TAIL_TOL",
]

# Default bound on probability mass lost to the photon-number cutoff.
DEFAULT_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the atom-cavity system.

    Attributes
    ----------
    omega0 : float
        Atomic transition angular frequency (> 0).
    omega_lambda : float
        Cavity mode angular frequency (> 0).
    g : complex
        Atom-cavity coupling frequency. Complex couplings are supported
        throughout; the common case is real g.
    """

    omega0: float
    omega_lambda: float
    g: complex

    @property
    def delta(self) -> float:
        """Detuning omega0 - omega_lambda."""
        return self.omega0 - self.omega_lambda

    @property
    def gamma_sum(self) -> float:
        """Sum frequency omega0 + omega_lambda."""
        return self.omega0 + self.omega_lambda


def make_params(omega0, omega_lambda, g) -> ModelParams:
    """Validate and build a :class:`ModelParams`.

    Raises
    ------
    ValueError
        If a frequency is non-positive or any input is non-finite.
    """
    omega0 = float(omega0)
    omega_lambda = float(omega_lambda)
    g = complex(g)
    if not (np.isfinite(omega0) and np.isfinite(omega_lambda)):
        raise ValueError("frequencies must be finite")
    if not (np.isfinite(g.real) and np.isfinite(g.imag)):
        raise ValueError("coupling g must be finite")
    if omega0 <= 0.0:
        raise ValueError(f"omega0 must be > 0, got {omega0}")
    if omega_lambda <= 0.0:
        raise ValueError(f"omega_lambda must be > 0, got {omega_lambda}")
    return ModelParams(omega0, omega_lambda, g)


@dataclass(frozen=True)
class MeanFieldState:
    """Reduced variables of the factorized (entanglement-free) system.

    Attributes
    ----------
    alpha : complex
        Expectation value of the photon annihilation operator.
    beta : complex
        Atomic coherence b * conj(c) of the two-level amplitudes.
    s : float
        Population inversion |b|^2 - |c|^2.

    Valid states satisfy s**2 + 4*|beta|**2 == 1 (a consequence of atomic
    normalization); this is monitored, not silently enforced.
    """

    alpha: complex
    beta: complex
    s: float

    def constraint_defect(self) -> float:
        """|s^2 + 4|beta|^2 - 1|, zero on the physical manifold."""
        return abs(self.s * self.s + 4.0 * abs(self.beta) ** 2 - 1.0)


def product_to_meanfield(b, c, alpha, tol=1e-9) -> MeanFieldState:
    """Map atomic amplitudes (b, c) and a field amplitude to reduced variables.

    Parameters
    ----------
    b, c : complex
        Excited / ground atomic amplitudes with |b|^2 + |c|^2 == 1.
    alpha : complex
        Field amplitude expectation, passed through unchanged.
    tol : float
        Accepted deviation of |b|^2 + |c|^2 from one.

    Raises
    ------
    ValueError
        If the atomic amplitudes are not normalized within ``tol``.
    """
    b = complex(b)
    c = complex(c)
    nrm = abs(b) ** 2 + abs(c) ** 2
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"|b|^2 + |c|^2 = {nrm!r}, expected 1 within {tol}")
    return MeanFieldState(alpha=complex(alpha), beta=b * c.conjugate(),
                          s=abs(b) ** 2 - abs(c) ** 2)


@dataclass(frozen=True)
class FockAmplitudes:
    """Truncated photon-number expansion of the entangled atom-field state.

    Attributes
    ----------
    n_max : int
        Highest retained photon number.
    b : ndarray, complex, length n_max + 1
        Amplitudes with the atom excited, indexed by photon number.
    c : ndarray, complex, length n_max + 1
        Amplitudes with the atom in the ground state.
    """

    n_max: int
    b: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.ascontiguousarray(self.b, dtype=np.complex128)
        c = np.ascontiguousarray(self.c, dtype=np.complex128)
        if b.shape != (self.n_max + 1,) or c.shape != (self.n_max + 1,):
            raise ValueError(
                f"amplitude vectors must have length n_max+1 = {self.n_max + 1}"
            )
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        b.setflags(write=False)
        c.setflags(write=False)

    def to_vector(self) -> np.ndarray:
        """Flatten to the ordered basis (e,0)..(e,n_max),(g,0)..(g,n_max)."""
        return np.concatenate([self.b, self.c])

    @classmethod
    def from_vector(cls, psi, n_max) -> "FockAmplitudes":
        psi = np.asarray(psi, dtype=np.complex128)
        if psi.shape != (2 * (n_max + 1),):
            raise ValueError("vector length does not match n_max")
        return cls(n_max=n_max, b=psi[: n_max + 1].copy(), c=psi[n_max + 1:].copy())


def norm_squared(state: FockAmplitudes) -> float:
    """Total probability sum |b_n|^2 + |c_n|^2 over retained levels."""
    return float(np.sum(np.abs(state.b) ** 2) + np.sum(np.abs(state.c) ** 2))


def fock_basis_state(n, n_max, atom_excited) -> FockAmplitudes:
    """Basis state with exactly ``n`` photons and a definite atomic level.

    Raises
    ------
    IndexError
        If ``n`` lies outside the retained range [0, n_max].
    """
    n = int(n)
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if not 0 <= n <= n_max:
        raise IndexError(f"photon number {n} outside [0, {n_max}]")
    b = np.zeros(n_max + 1, dtype=np.complex128)
    c = np.zeros(n_max + 1, dtype=np.complex128)
    if atom_excited:
        b[n] = 1.0
    else:
        c[n] = 1.0
    return FockAmplitudes(n_max=n_max, b=b, c=c)


def coherent_amplitudes(alpha_c, n_max, atom_excited, tail_tol=DEFAULT_TAIL_TOL,
                        strict=True) -> FockAmplitudes:
    """Coherent field state on one atomic channel, truncated at ``n_max``.

    The amplitude at photon number n is exp(-|a|^2/2) a^n / sqrt(n!), built
    by the overflow-free recurrence amp_{n+1} = amp_n * a / sqrt(n+1). After
    truncation the vector is renormalized to unit norm.

    Parameters
    ----------
    alpha_c : complex
        Coherent amplitude; mean photon number is |alpha_c|^2.
    n_max : int
        Photon-number cutoff.
    atom_excited : bool
        Whether the amplitudes sit on the excited or the ground channel.
    tail_tol : float
        Maximum probability mass allowed beyond the cutoff.
    strict : bool
        If true, exceeding ``tail_tol`` raises; otherwise the state is
        silently renormalized (useful inside truncation searches).

    Raises
    ------
    TruncationError
        In strict mode when the discarded mass exceeds ``tail_tol``.
    """
    alpha_c = complex(alpha_c)
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    amp = np.zeros(n_max + 1, dtype=np.complex128)
    amp[0] = np.exp(-0.5 * abs(alpha_c) ** 2)
    for n in range(n_max):
        amp[n + 1] = amp[n] * alpha_c / np.sqrt(n + 1.0)
    kept = float(np.sum(np.abs(amp) ** 2))
    discarded = max(0.0, 1.0 - kept)
    if strict and discarded > tail_tol:
        raise TruncationError(
            f"coherent state |alpha_c|^2 = {abs(alpha_c) ** 2:g} loses "
            f"{discarded:.3e} probability beyond n_max = {n_max} "
            f"(allowed {tail_tol:.1e})"
        )
    amp /= np.sqrt(kept)
    zeros = np.zeros_like(amp)
    if atom_excited:
        return FockAmplitudes(n_max=n_max, b=amp, c=zeros)
    return FockAmplitudes(n_max=n_max, b=zeros, c=amp)


@dataclass
class Trajectory:
    """Time-ordered samples of a state plus derived observable channels.

    ``states`` holds whatever the producing backend samples (reduced
    mean-field states, Fock amplitude sets, or raw flat vectors from the
    integrator). ``channels`` maps names to per-sample arrays, real or
    complex. ``meta`` carries run diagnostics (step counts etc.).
    """

    times: np.ndarray
    states: list
    channels: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if len(self.states) != len(self.times):
            raise ValueError("states and times must have equal length")
        for name, values in self.channels.items():
            if len(values) != len(self.times):
                raise ValueError(f"channel {name!r} length mismatch")

    def channel(self, name) -> np.ndarray:
        if name not in self.channels:
            raise KeyError(f"trajectory has no channel {name!r}")
        return self.channels[name]
