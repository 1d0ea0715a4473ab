"""Exception types shared across the package."""


class BlochnlsError(Exception):
    """Base class for all package errors."""


class AliasError(BlochnlsError):
    """Fourier truncation too large for the requested sampling grid."""


class RealityError(BlochnlsError):
    """Coefficient data is not Hermitian-symmetric / not real on the grid."""


class EllipticityError(BlochnlsError):
    """A coefficient required to be positive fails positivity on samples."""


class TruncationError(BlochnlsError):
    """Requested Fourier modes exceed the representable range."""


class SimplenessError(BlochnlsError):
    """Eigenvalue degeneracy detected where a simple band is required."""


class StepError(BlochnlsError):
    """Finite-difference step refinement shows no convergence."""


class NormalizationError(BlochnlsError):
    """Eigenfunction norm deviates from 1 beyond tolerance."""


class ResonanceError(BlochnlsError):
    """Nonresonance margin fell below tolerance."""


class BracketError(BlochnlsError):
    """Shooting method found no overshoot/undershoot bracket."""


class StiffnessError(BlochnlsError):
    """Radial ODE integration failed."""


class ProfileRangeError(BlochnlsError):
    """Radial profile queried beyond its range with a non-negligible tail."""


class NanError(BlochnlsError):
    """Field became non-finite during time stepping (blowup or bad setup)."""


class ConfigError(BlochnlsError):
    """Invalid or inconsistent study configuration."""


class DomainError(BlochnlsError):
    """Input outside the mathematical domain of an operation."""


class DegenerateWarning(UserWarning):
    """Requested band is within tolerance of a neighbour (not simple)."""
