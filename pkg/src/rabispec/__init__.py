"""rabispec: spectral analysis of quantum-Rabi-type Jacobi operators.

Submodules
----------
model        entry generators, hypotheses, physical-parameter reduction
eigensolve   Sturm/bisection eigensolver with certified truncation
transform    cut-off window operators and the rotated-potential diagonal
asymptotics  closed-form eigenvalue predictions and residual fits
oscillatory  circle/interval oscillatory integrals with bound checks
phase        phase-function algebra on the circle
inverse      recovery of (omega, E, g) from spectra
cli          batch command-line interface
"""

from .errors import (
    AccuracyError,
    DomainError,
    LabelingError,
    ModelMismatchError,
    TruncationError,
    WindowError,
)
from .model import (
    ModelSpec,
    OffDiagonalProfile,
    PeriodicPotential,
    RabiParams,
    RabiReduction,
    entries,
    fourier_decompose,
    load_model,
    model_from_dict,
    model_to_dict,
    rabi_to_jacobi,
)
from .eigensolve import (
    SpectrumSlice,
    TridiagonalWindow,
    TruncationPolicy,
    dense_eigenvalues,
    eigenvalue_by_index,
    eigenvalues_by_index,
    spectrum_of_J,
    spectrum_of_window_operator,
    sturm_count,
)
from .transform import (
    AuxiliaryOperators,
    CutoffProfile,
    DEFAULT_CUTOFF,
    GaussianWindow,
    build_auxiliary,
    gn_diagonal,
    trace_functional,
)
from .asymptotics import (
    FitReport,
    PredictionTable,
    fit_log_decay,
    predict,
    r_amplitude_bound,
    r_of_n,
    residual_fit,
)
from .oscillatory import (
    CorputIntegrand,
    PeriodicSymbol,
    corput_bound,
    g_frak,
    g_frak_general_n,
    integral_I,
    integral_J,
    stationary_phase,
    stationary_symbol_family,
)
from .phase import (
    PhaseField,
    PhaseState,
    build_phase_field,
    h_frak,
    omega_star,
    psi1_recursion_check,
    z_bounds_check,
    z_state,
)
from .inverse import RecoveryResult, recover_parameters

__version__ = "0.1.0"
