"""Numerical toolkit for the NLS-envelope approximation of wavepackets in
periodic media: Bloch band structures, effective NLS parameters, Townes
ground states, split-step Gross-Pitaevskii evolution, and eps-convergence
measurement of the sup-norm approximation error."""

from .errors import (
    AliasError,
    BlochnlsError,
    BracketError,
    ConfigError,
    DegenerateWarning,
    DomainError,
    EllipticityError,
    NanError,
    NormalizationError,
    ProfileRangeError,
    RealityError,
    ResonanceError,
    SimplenessError,
    StepError,
    StiffnessError,
    TruncationError,
)
from .cell import Lattice, PeriodicCoefficients, sample_coefficients, sample_on_box
from .transform import BlochField, bloch_transform, bloch_inverse, quasiperiodic_shift
from .bands import (
    BandTable,
    BlochMode,
    BlochOperatorSpec,
    assemble_operator,
    band_gradient,
    band_hessian,
    band_structure,
    band_values,
    hellmann_feynman_gradient,
    omega_values,
    check_asymptotics,
    check_nonresonance,
    k_path,
    solve_bands,
)
from .nls import EffectiveNlsParams, effective_params, nu_gp, nu_nlw
from .townes import RadialProfile, townes_shoot
from .dynamics import (
    ComplexField,
    StepperConfig,
    linear_step,
    nonlinear_step,
    strang_evolve,
)
from .wavepacket import (
    ErrorSeries,
    WavepacketSpec,
    assemble_ansatz,
    gp_residual,
    sup_error,
)
from .study import (
    ConvergenceReport,
    StudyConfig,
    emit_report,
    fit_slope,
    load_config,
    run_convergence,
    study_lattice,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
