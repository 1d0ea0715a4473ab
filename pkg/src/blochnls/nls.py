"""Effective NLS parameters of a carrier Bloch mode.

A wavepacket u ~ eps A(eps(x - v_g t), eps^2 t) p(x) e^{i(k0.x - omega0 t)}
concentrated on a simple band lambda_{n0}(k) obeys the effective NLS

    i dT A + (1/2) div(D^2 omega(k0) grad A) + nu |A|^2 A = 0,

so the dispersion matrix entering the NLS is HALF the band Hessian.  The
nonlinear coupling for the Gross-Pitaevskii source term sigma|u|^2 u is

    nu = - int_P sigma(x) |p(x)|^4 dx,        ||p||_{L^2(P)} = 1,

and for the quasilinear wave problem with cubic coefficient chi3,

    nu = (3 / omega0) int_P chi3(x) |p(x)|^4 chi1(x)^{-1} dx,
    ||p||_{L^2_chi1(P)} = 1.

Derivation of the wave constant: in symmetrized frequency variables
z_{+-n} = (u_n -+ i w_n)/sqrt(2) the cubic term of the carrier-pair
equation collects the 3 diagonal frequency combinations of the pairing
(2/omega0) <chi3 . , .>_{L^2_chi1}; each z carries a factor 1/sqrt(2) and
the projection back contributes sqrt(2), so all root-two factors cancel and
the envelope equation keeps (3/omega0) times the chi1-weighted |p|^4
integral.  Guards: the GP limit chi1 == 1 reduces to
-(3/omega0) nu_gp(sigma=chi3), and nu is linear in chi3.

Closed form used as a cross-check: for constant sigma = sigma0 and a pure
plane-wave mode |p| = (2pi)^{-d/2}, nu = -sigma0 (2pi)^{-d}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cell import Lattice, PeriodicCoefficients, sample_coefficients
from .bands import BlochMode, BlochOperatorSpec, band_hessian, band_gradient, solve_bands
from .errors import NormalizationError

NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class EffectiveNlsParams:
    """Carrier data (omega0, v_g) and NLS coefficients (dispersion, nu)."""

    k0: np.ndarray
    band_index: int
    omega0: float
    v_g: np.ndarray
    hessian: np.ndarray          # full D^2 omega(k0)
    nu: float

    @property
    def nls_dispersion(self) -> np.ndarray:
        """The matrix in the NLS term (1/2) div(D^2 omega grad A)."""
        return 0.5 * self.hessian

    @property
    def alpha(self) -> float:
        """Scalar dispersion tr(D^2 omega)/d used by the radial profile."""
        return float(np.trace(self.hessian)) / self.hessian.shape[0]

    @property
    def isotropy_defect(self) -> float:
        """||D^2 omega - alpha I||_inf; zero for an isotropic band."""
        d = self.hessian.shape[0]
        dev = self.hessian - self.alpha * np.eye(d)
        return float(np.max(np.abs(dev)))


def _cell_integral(values: np.ndarray, grid_points: int, dim: int) -> float:
    """Rectangle rule over the periodicity cell (spectrally accurate for
    trigonometric integrands resolved by the grid)."""
    return float(np.sum(values).real) * (2 * np.pi / grid_points) ** dim


def _mode_samples(mode: BlochMode, grid_points: int):
    dim = mode.k.size
    lat = Lattice(dim, grid_points, (1,) * dim)
    return lat, mode.on_cell(lat)


def nu_gp(sigma: PeriodicCoefficients, mode: BlochMode, grid_points: int = 128) -> float:
    """NLS coupling nu = -int_P sigma |p|^4 dx for the GP nonlinearity.

    The mode must carry the plain-L^2 normalization ||p|| = 1; grid_points
    must resolve all modes of sigma |p|^4 for the quadrature to be exact.
    """
    if mode.norm_convention != "L2":
        raise ValueError("nu_gp requires a plain-L^2 normalized mode")
    dim = mode.k.size
    lat, p = _mode_samples(mode, grid_points)
    norm2 = _cell_integral(np.abs(p) ** 2, grid_points, dim)
    if abs(norm2 - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"||p||^2 = {norm2} deviates from 1")
    sig = sample_coefficients(sigma, lat)
    return -_cell_integral(sig * np.abs(p) ** 4, grid_points, dim)


def nu_nlw(
    chi3: PeriodicCoefficients,
    mode: BlochMode,
    omega0: float,
    chi1: PeriodicCoefficients | None = None,
    grid_points: int = 128,
) -> float:
    """NLS coupling (3/omega0) int_P chi3 |p|^4 / chi1 dx for the cubic
    wave nonlinearity; linear in chi3; requires L^2_chi1 normalization."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    dim = mode.k.size
    lat, p = _mode_samples(mode, grid_points)
    c1 = sample_coefficients(chi1, lat) if chi1 is not None else np.ones(p.shape)
    norm2 = _cell_integral(c1 * np.abs(p) ** 2, grid_points, dim)
    if abs(norm2 - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"||p||^2_chi1 = {norm2} deviates from 1")
    c3 = sample_coefficients(chi3, lat)
    return (3.0 / omega0) * _cell_integral(c3 * np.abs(p) ** 4 / c1, grid_points, dim)


def effective_params(
    spec: BlochOperatorSpec,
    k0,
    n0: int,
    nonlinearity: PeriodicCoefficients,
    grid_points: int = 128,
) -> EffectiveNlsParams:
    """Assemble all effective NLS data of band n0 at carrier wavenumber k0.

    nonlinearity is sigma for kind='schrodinger' (GP) and chi3 for
    kind='wave'.  Band derivatives use validated finite differences.
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    mode = solve_bands(spec, k0, n0, check_simple_at=n0)[n0 - 1]
    omega0 = float(np.sqrt(mode.lam)) if spec.kind == "wave" else float(mode.lam)
    vg = band_gradient(spec, k0, n0)
    H = band_hessian(spec, k0, n0)
    if spec.kind == "wave":
        nu = nu_nlw(nonlinearity, mode, omega0, spec.chi1, grid_points)
    else:
        nu = nu_gp(nonlinearity, mode, grid_points)
    return EffectiveNlsParams(k0, n0, omega0, vg, H, float(nu))
