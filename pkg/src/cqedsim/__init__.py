"""Dynamics of a two-level atom coupled to one quantized cavity mode.

Four interchangeable backends cover the same parameter space:

- ``meanfield``: the closed factorized system in the reduced variables
  (alpha, beta, s);
- ``fock``: truncated photon-number amplitude equations integrated in time;
- ``oracle``: exact eigendecomposition propagation of the same Hamiltonian;
- ``rwa``: the closed-form excitation-conserving reference.
"""

from .errors import (ConfigError, ConstraintDriftError, NonFiniteError,
                     NormDriftError, NumericalError, ResourceLimitError,
                     StepUnderflowError, TruncationError)
from .fock import (FockDerivative, auto_truncate, fock_rhs, simulate_fock,
                   tail_mass)
from .integrate import StepControl, integrate_adaptive, integrate_fixed, rk4_step
from .meanfield import (MeanFieldDerivative, constraint_defect,
                        default_initial_state, meanfield_rhs,
                        simulate_meanfield)
from .model import (FockAmplitudes, MeanFieldState, ModelParams, Trajectory,
                    coherent_amplitudes, fock_basis_state, make_params,
                    norm_squared, product_to_meanfield)
from .observables import (SinusoidFit, energy_expectation, excited_probability,
                          field_expectation, mean_photon_number,
                          sinusoid_deviation, unwrap_phase)
from .rwa import (RwaBlock, rwa_block, rwa_block_evolve, rwa_evolve,
                  rwa_excited_probability, simulate_rwa)
from .spectral import (HamiltonianMatrix, SpectralDecomposition,
                       build_hamiltonian, decompose, hermiticity_defect,
                       propagate, simulate_oracle)

__version__ = "0.1.0"
