"""Plane-wave Galerkin solver for the Bloch eigenvalue problem.

The cell operator -chi1 |grad + ik|^2 + chi2 on (0,2pi]^d with periodic
boundary conditions is Hermitian in the chi1-weighted L^2 inner product.
Dividing by chi1 restores a generalized Hermitian matrix problem over the
plane waves exp(i m.x), |m_j| <= N:

    A(k)_{mm'} = |k+m|^2 delta_{mm'} + (chi2/chi1)^hat_{m-m'},
    B_{mm'}    = (1/chi1)^hat_{m-m'}   (identity when chi1 == 1).

Eigenvalues are 1-periodic in k and sorted ascending; frequencies are
omega = lambda for the Schroedinger case and omega = sqrt(lambda) for the
wave case.

Potentials invariant under the half-cell translation x -> x + (pi,..,pi)
(all Fourier modes with even index sum, e.g. prod_j cos x_j) block-
diagonalize over the parity of sum_j m_j.  Band counting inside one parity
sector matches counting on the minimal periodicity cell of such potentials;
the reference two-dimensional example labels its carrier band this way.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .cell import Lattice, PeriodicCoefficients, sample_coefficients
from .errors import (
    DegenerateWarning,
    DomainError,
    EllipticityError,
    ResonanceError,
    SimplenessError,
    StepError,
    TruncationError,
)

RESIDUAL_TOL = 1e-8
DEGENERACY_RELTOL = 1e-6
FD_STEP = 1e-3


@dataclass(frozen=True)
class BlochOperatorSpec:
    """Coefficients and discretization of the Bloch operator L(k).

    chi1=None means chi1 == 1 (Schroedinger/GP case, chi2 = V); then the
    mass matrix is the identity.  kind='wave' takes omega_n = sqrt(lambda_n).
    sublattice_parity in {0, 1} restricts the plane-wave basis to modes with
    even/odd index sum (valid only for half-cell-translation symmetric
    coefficients; checked at assembly).
    """

    dim: int
    chi2: PeriodicCoefficients
    chi1: PeriodicCoefficients | None = None
    truncation: int = 10
    kind: str = "schrodinger"
    sublattice_parity: int | None = None

    def __post_init__(self):
        if self.kind not in ("schrodinger", "wave"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.chi2.dim != self.dim or (self.chi1 is not None and self.chi1.dim != self.dim):
            raise ValueError("coefficient dimension mismatch")
        if self.sublattice_parity not in (None, 0, 1):
            raise ValueError("sublattice_parity must be None, 0 or 1")

    @property
    def modes(self) -> np.ndarray:
        """Galerkin mode multi-indices, shape (n_modes, dim)."""
        N = self.truncation
        ms = np.array(list(itertools.product(range(-N, N + 1), repeat=self.dim)))
        if self.sublattice_parity is not None:
            ms = ms[np.sum(ms, axis=1) % 2 == self.sublattice_parity]
        return ms


@dataclass(frozen=True)
class BlochMode:
    """One Bloch eigenpair (lambda_n(k), p_n(.,k)) in Fourier coefficients."""

    k: np.ndarray
    band_index: int
    lam: float
    coeffs: np.ndarray = field(repr=False)   # aligned with spec.modes
    modes: np.ndarray = field(repr=False)
    norm_convention: str = "L2"              # 'L2' or 'L2_chi1'

    @property
    def omega(self) -> float:
        return self.lam

    def on_cell(self, lattice: Lattice) -> np.ndarray:
        """Sample p(x) on one P^d cell grid."""
        axes = lattice.cell_axes()
        P = lattice.cell_points
        out = np.zeros((P,) * len(axes), dtype=complex)
        grids = np.meshgrid(*axes, indexing="ij")
        for c, m in zip(self.coeffs, self.modes):
            phase = np.zeros_like(grids[0])
            for mj, g in zip(m, grids):
                phase = phase + mj * g
            out += c * np.exp(1j * phase)
        return out

    def on_box(self, lattice: Lattice) -> np.ndarray:
        """Periodic tiling of the cell samples over the box grid."""
        return np.tile(self.on_cell(lattice), lattice.num_cells)


@dataclass(frozen=True)
class BandTable:
    """Tabulated bands lambda_n(k_i), ascending in n for every k."""

    k_grid: np.ndarray            # (n_k, dim)
    bands: np.ndarray             # (n_k, n_max)
    n_max: int
    path_ticks: list | None = None  # [(arclength, label), ...] for plots
    arclength: np.ndarray | None = None

    def __post_init__(self):
        if np.any(np.diff(self.bands, axis=1) < -1e-12):
            raise ValueError("bands not sorted ascending")


def reduce_wavenumber(k) -> tuple[np.ndarray, np.ndarray]:
    """Reduce k into (-1/2, 1/2]^d; returns (k_red, integer shift)."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    shift = np.ceil(k - 0.5)
    return k - shift, shift.astype(int)


def _fourier_table(spec: BlochOperatorSpec, which: str) -> np.ndarray | None:
    """Fourier coefficients of chi2/chi1 ('ratio') or 1/chi1 ('mass') on
    the difference range {-2N..2N}^d.  None for an identity mass matrix."""
    N = spec.truncation
    d = spec.dim
    need = 2 * N
    if spec.chi1 is None:
        if which == "mass":
            return None
        # exact: chi2's own coefficients, zero-padded
        table = np.zeros((2 * need + 1,) * d, dtype=complex)
        Nc = spec.chi2.truncation
        if Nc > need:
            raise TruncationError("coefficient modes exceed representable range")
        sl = tuple(slice(need - Nc, need + Nc + 1) for _ in range(d))
        table[sl] = spec.chi2.coeffs
        return table
    # sample on a fine grid, divide pointwise, transform back
    Nc = max(spec.chi2.truncation, spec.chi1.truncation)
    P_fine = max(128, 8 * N + 8, 8 * Nc + 8)
    lat = Lattice(d, P_fine, (1,) * d)
    chi1 = sample_coefficients(spec.chi1, lat)
    if np.min(chi1) <= 0:
        raise EllipticityError(f"chi1 min sample {np.min(chi1):.3g} <= 0")
    if which == "mass":
        vals = 1.0 / chi1
    else:
        vals = sample_coefficients(spec.chi2, lat) / chi1
    spec_hat = np.fft.fftn(vals) / P_fine**d
    table = np.zeros((2 * need + 1,) * d, dtype=complex)
    for m in itertools.product(range(-need, need + 1), repeat=d):
        table[tuple(mj + need for mj in m)] = spec_hat[tuple(mj % P_fine for mj in m)]
    return table


def _check_parity_support(table: np.ndarray, d: int) -> None:
    need = (table.shape[0] - 1) // 2
    idx = np.indices(table.shape).reshape(d, -1).T - need
    odd = np.sum(idx, axis=1) % 2 == 1
    scale = max(np.max(np.abs(table)), 1.0)
    if np.max(np.abs(table.reshape(-1)[odd])) > 1e-12 * scale:
        raise ValueError(
            "sublattice_parity requested but coefficients couple the parity sectors"
        )


def assemble_operator(spec: BlochOperatorSpec, k) -> tuple[np.ndarray, np.ndarray | None]:
    """Galerkin matrices (A(k), B) of the reformulated eigenproblem.

    k outside the Brillouin zone is reduced mod 1 (bands are 1-periodic).
    B is None when chi1 == 1 (standard Hermitian problem).
    """
    k_red, _ = reduce_wavenumber(k)
    if k_red.size != spec.dim:
        raise ValueError("wavenumber dimension mismatch")
    ms = spec.modes
    ratio = _fourier_table(spec, "ratio")
    mass = _fourier_table(spec, "mass")
    if spec.sublattice_parity is not None:
        _check_parity_support(ratio, spec.dim)
        if mass is not None:
            _check_parity_support(mass, spec.dim)
    need = 2 * spec.truncation
    dm = ms[:, None, :] - ms[None, :, :]             # (n, n, d)
    gather = tuple(dm[..., j] + need for j in range(spec.dim))
    A = ratio[gather].copy()
    kin = np.sum((k_red[None, :] + ms) ** 2, axis=1)
    A[np.diag_indices_from(A)] += kin
    B = mass[gather] if mass is not None else None
    return A, B


def solve_bands(
    spec: BlochOperatorSpec,
    k,
    n_max: int,
    check_simple_at: int | None = None,
) -> list[BlochMode]:
    """Lowest n_max eigenpairs at k, ascending, orthonormal in the mass
    inner product (L^2_chi1; plain L^2 when chi1 == 1).

    The eigenvector phase is fixed so the largest-modulus Fourier
    coefficient is real positive.  check_simple_at=n warns if lambda_n is
    within relative tolerance 1e-6 of a neighbour.
    """
    A, B = assemble_operator(spec, k)
    if n_max > A.shape[0]:
        raise ValueError(f"n_max={n_max} exceeds Galerkin dimension {A.shape[0]}")
    if B is None:
        lam, vec = scipy.linalg.eigh(A, subset_by_index=(0, n_max - 1))
    else:
        lam, vec = scipy.linalg.eigh(A, B, subset_by_index=(0, n_max - 1))
    if spec.kind == "wave" and lam[0] <= 0:
        raise DomainError(f"wave operator has nonpositive eigenvalue {lam[0]:.3g}")
    if check_simple_at is not None:
        n0 = check_simple_at
        gap = min(
            abs(lam[n0 - 1] - lam[n0 - 2]) if n0 >= 2 else np.inf,
            abs(lam[n0] - lam[n0 - 1]) if n0 < n_max else np.inf,
        )
        if gap < DEGENERACY_RELTOL * max(abs(lam[n0 - 1]), 1.0):
            warnings.warn(
                f"lambda_{n0}(k) within reltol {DEGENERACY_RELTOL} of a neighbour",
                DegenerateWarning,
            )
    k_red, _ = reduce_wavenumber(k)
    d = spec.dim
    norm = "L2" if spec.chi1 is None else "L2_chi1"
    out = []
    for n in range(n_max):
        c = vec[:, n]
        # ||p||^2 in the mass inner product is (2pi)^d c^H B c
        c = c / (2 * np.pi) ** (d / 2)
        j = int(np.argmax(np.abs(c)))
        c = c * (np.conj(c[j]) / abs(c[j]))
        out.append(BlochMode(k_red, n + 1, float(lam[n]), c, spec.modes, norm))
    return out


def band_values(spec: BlochOperatorSpec, k, n_max: int) -> np.ndarray:
    """Just the lowest n_max eigenvalues at k."""
    A, B = assemble_operator(spec, k)
    if B is None:
        return scipy.linalg.eigh(A, eigvals_only=True, subset_by_index=(0, n_max - 1))
    return scipy.linalg.eigh(A, B, eigvals_only=True, subset_by_index=(0, n_max - 1))


def omega_values(spec: BlochOperatorSpec, k, n_max: int) -> np.ndarray:
    """Frequencies: lambda (Schroedinger) or sqrt(lambda) (wave)."""
    lam = band_values(spec, k, n_max)
    if spec.kind == "wave":
        if lam[0] <= 0:
            raise DomainError("nonpositive eigenvalue under kind='wave'")
        return np.sqrt(lam)
    return lam


# --- band tables and k paths -------------------------------------------------

CORNERS_2D = {"G": (0.0, 0.0), "X": (0.5, 0.0), "M": (0.5, 0.5)}
CORNERS_1D = {"G": (0.0,), "X": (0.5,)}


def k_path(path: str, dim: int, points_per_segment: int = 40):
    """Piecewise-linear k path through named Brillouin-zone corners.

    Returns (k_list, arclength, ticks) with ticks at the corner positions.
    """
    corners = CORNERS_2D if dim == 2 else CORNERS_1D
    try:
        pts = [np.array(corners[c]) for c in path]
    except KeyError as e:
        raise ValueError(f"unknown corner {e} for d={dim}; valid: {sorted(corners)}")
    ks = []
    for a, b in zip(pts[:-1], pts[1:]):
        seg = np.linspace(0, 1, points_per_segment, endpoint=False)[:, None]
        ks.append(a + seg * (b - a))
    ks.append(pts[-1][None, :])
    k_list = np.vstack(ks)
    dists = np.concatenate([[0.0], np.linalg.norm(np.diff(k_list, axis=0), axis=1)])
    arclength = np.cumsum(dists)
    acc = 0.0
    ticks = [(0.0, path[0])]
    for i, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
        acc += float(np.linalg.norm(b - a))
        ticks.append((acc, path[i + 1]))
    return k_list, arclength, ticks


def band_structure(spec: BlochOperatorSpec, k_list, n_max: int,
                   arclength=None, ticks=None) -> BandTable:
    """Tabulate the lowest n_max bands over a list/grid of k points."""
    k_list = np.atleast_2d(np.asarray(k_list, dtype=float))
    bands = np.empty((len(k_list), n_max))
    for i, k in enumerate(k_list):
        bands[i] = band_values(spec, k, n_max)
    return BandTable(k_list, bands, n_max, path_ticks=ticks, arclength=arclength)


# --- band derivatives ---------------------------------------------------------


def _omega_fd(spec, k, n0, h):
    """omega_{n0} at k with a simpleness guard for FD stencils."""
    lam = band_values(spec, k, n0 + 1)
    gap = np.inf
    if n0 >= 2:
        gap = min(gap, abs(lam[n0 - 1] - lam[n0 - 2]))
    if len(lam) > n0:
        gap = min(gap, abs(lam[n0] - lam[n0 - 1]))
    if gap < DEGENERACY_RELTOL * max(abs(lam[n0 - 1]), 1.0):
        raise SimplenessError(f"degeneracy at k={np.asarray(k)} inside FD stencil")
    val = lam[n0 - 1]
    return float(np.sqrt(val)) if spec.kind == "wave" else float(val)


def _fd_gradient(f, k0, h, d):
    g = np.empty(d)
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        g[j] = (-f(k0 + 2 * e) + 8 * f(k0 + e) - 8 * f(k0 - e) + f(k0 - 2 * e)) / (12 * h)
    return g


def band_gradient(spec: BlochOperatorSpec, k0, n0: int, h: float = FD_STEP) -> np.ndarray:
    """Group velocity grad omega_{n0}(k0), fourth-order centered differences
    cross-checked against the Hellmann-Feynman derivative.

    Raises StepError when halving h moves the result (no FD convergence) and
    SimplenessError on degeneracy inside the stencil.
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    d = spec.dim
    f = lambda k: _omega_fd(spec, k, n0, h)
    g1 = _fd_gradient(f, k0, h, d)
    g2 = _fd_gradient(f, k0, h / 2, d)
    scale = max(np.max(np.abs(g2)), 1.0)
    if np.max(np.abs(g1 - g2)) > 1e-5 * scale:
        raise StepError("gradient finite differences do not converge under h-refinement")
    ghf = hellmann_feynman_gradient(spec, k0, n0)
    if np.max(np.abs(g2 - ghf)) > 1e-6 * scale:
        raise StepError(
            f"FD gradient {g2} disagrees with Hellmann-Feynman {ghf} beyond 1e-6"
        )
    return g2


def hellmann_feynman_gradient(spec: BlochOperatorSpec, k0, n0: int) -> np.ndarray:
    """grad omega via d lambda/d k_j = <dA/dk_j c, c> / <B c, c>.

    In the chi1-normalized formulation dA/dk_j is the diagonal matrix
    2(k_j + m_j); the mass matrix is k-independent.
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    modes = solve_bands(spec, k0, n0, check_simple_at=n0)
    mode = modes[n0 - 1]
    c = mode.coeffs
    A, B = assemble_operator(spec, k0)
    denom = np.real(np.vdot(c, B @ c)) if B is not None else np.real(np.vdot(c, c))
    k_red, _ = reduce_wavenumber(k0)
    g = np.empty(spec.dim)
    for j in range(spec.dim):
        dAdk = 2.0 * (k_red[j] + mode.modes[:, j])
        g[j] = np.real(np.vdot(c, dAdk * c)) / denom
    if spec.kind == "wave":
        g = g / (2.0 * np.sqrt(mode.lam))
    return g


def band_hessian(spec: BlochOperatorSpec, k0, n0: int, h: float = FD_STEP) -> np.ndarray:
    """Dispersion matrix D^2 omega_{n0}(k0), finite differences.

    Diagonal entries use the fourth-order second-difference stencil; mixed
    entries use the centered cross stencil Richardson-extrapolated from h
    and h/2.  The result is symmetrized.
    """
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    d = spec.dim
    f = lambda k: _omega_fd(spec, k, n0, h)
    H = np.zeros((d, d))
    f0 = f(k0)
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        H[j, j] = (
            -f(k0 + 2 * e) + 16 * f(k0 + e) - 30 * f0 + 16 * f(k0 - e) - f(k0 - 2 * e)
        ) / (12 * h * h)
    for i in range(d):
        for j in range(i + 1, d):
            def cross(hh):
                ei = np.zeros(d); ei[i] = hh
                ej = np.zeros(d); ej[j] = hh
                return (
                    f(k0 + ei + ej) - f(k0 + ei - ej) - f(k0 - ei + ej) + f(k0 - ei - ej)
                ) / (4 * hh * hh)
            H[i, j] = H[j, i] = (4 * cross(h / 2) - cross(h)) / 3
    return 0.5 * (H + H.T)


# --- spectral sanity checks ---------------------------------------------------


def check_asymptotics(spec: BlochOperatorSpec, k, n_max: int) -> tuple[float, float]:
    """Empirical Weyl bounds C1 n^{2/d} <= lambda_n(k) <= C2 n^{2/d}.

    Report-only: returns (C1, C2) over the tail half n in (n_max/2, n_max],
    where the asymptotic regime is visible (low bands reflect the potential,
    not the eigenvalue counting).
    """
    if n_max < 20:
        raise ValueError("need n_max >= 20 to see the eigenvalue tail")
    lam = band_values(spec, k, n_max)
    n = np.arange(1, n_max + 1)
    ratios = (lam / n ** (2.0 / spec.dim))[n_max // 2 :]
    return float(np.min(ratios)), float(np.max(ratios))


@dataclass(frozen=True)
class NonresonanceResult:
    margin: float
    argmin: tuple[int, int]   # (band index n with sign, harmonic j)
    n_scan: int


def check_nonresonance(
    spec: BlochOperatorSpec, k0, n0: int, n_scan: int = 64, tol: float = 1e-8
) -> NonresonanceResult:
    """Distance of the harmonics j*omega_{n0}(k0), j in {+-1, +-3}, from the
    wave frequencies omega_n(j k0), n in +-{1..n_scan}.

    Frequencies are signed, omega_{-n}(k) = -omega_n(k), and j*k0 is reduced
    into the Brillouin zone (bands are 1-periodic).  The pairs (n0, 1) and
    (-n0, -1) are the carrier itself and are excluded.  Scanning a finite
    band range suffices: once omega_n at the four reduced wavenumbers
    exceeds 3*omega_0, the distance |j*omega_0 - omega_n| grows with n
    (omega_n -> infinity), so the infimum over all n is attained inside the
    scanned range provided omega_{n_scan} > 3*omega_0; this is verified and
    n_scan is enlarged otherwise by the caller.
    """
    if spec.kind != "wave":
        raise ValueError("nonresonance check applies to kind='wave'")
    k0 = np.atleast_1d(np.asarray(k0, dtype=float))
    omega0 = float(omega_values(spec, k0, n0)[n0 - 1])
    margin, argmin = np.inf, (0, 0)
    for j in (1, -1, 3, -3):
        om = omega_values(spec, j * k0, n_scan)   # reduced mod 1 internally
        if om[-1] <= 3 * omega0:
            raise ValueError(
                f"n_scan={n_scan} too small: omega_{n_scan}(jk0)={om[-1]:.3g}"
                f" has not exceeded 3*omega0={3*omega0:.3g}"
            )
        for sign in (1, -1):
            for n in range(1, n_scan + 1):
                if (sign * n, j) in ((n0, 1), (-n0, -1)):
                    continue
                dist = abs(j * omega0 - sign * om[n - 1])
                if dist < margin:
                    margin, argmin = dist, (sign * n, j)
    if margin < tol:
        raise ResonanceError(
            f"nonresonance margin {margin:.3g} below {tol} at (n,j)={argmin}"
        )
    return NonresonanceResult(float(margin), argmin, n_scan)
