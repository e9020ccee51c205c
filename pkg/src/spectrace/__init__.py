"""Recovery of a 1-D wave-equation damping coefficient from complex eigenvalues.

The package has four layers:

- ``forward``: Chebyshev collocation of the damped wave operator, dense
  eigensolve, closed-form constant-damping oracle, synthetic noise.
- ``traces``: Fourier-modal matrices, trace recursions and stabilized
  spectral sums evaluated either from coefficients or from eigenvalues.
- ``inversion``: Gauss-Newton on the stabilized trace residuals with
  analytically recursive Jacobians.
- ``experiments``: reproducible example runs, sweeps and file output,
  driven by the ``spectrace`` command line tool.
"""

from spectrace.damping import FourierDamping, cosine_coefficients
from spectrace.forward import (
    GridOperator,
    NoiseModel,
    Spectrum,
    add_noise,
    assemble_companion,
    build_grid_operator,
    check_weak_damping,
    compute_spectrum,
    constant_damping_spectrum,
)
from spectrace.traces import (
    ModalMatrixSet,
    TraceVector,
    build_m1_basis,
    build_modal_set,
    mn_traces,
    raw_power_traces,
    spectral_traces,
    tn_matrix_traces,
    tn_scalar,
)
from spectrace.inversion import (
    GNConfig,
    InversionRun,
    estimate_alpha0,
    gauss_newton,
    l2_error,
    multistep_schedule,
    trace_jacobian,
)

__all__ = [
    "FourierDamping",
    "cosine_coefficients",
    "GridOperator",
    "NoiseModel",
    "Spectrum",
    "add_noise",
    "assemble_companion",
    "build_grid_operator",
    "check_weak_damping",
    "compute_spectrum",
    "constant_damping_spectrum",
    "ModalMatrixSet",
    "TraceVector",
    "build_m1_basis",
    "build_modal_set",
    "mn_traces",
    "raw_power_traces",
    "spectral_traces",
    "tn_matrix_traces",
    "tn_scalar",
    "GNConfig",
    "InversionRun",
    "estimate_alpha0",
    "gauss_newton",
    "l2_error",
    "multistep_schedule",
    "trace_jacobian",
]

__version__ = "0.1.0"
