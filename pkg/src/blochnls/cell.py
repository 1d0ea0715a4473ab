"""Periodic-cell geometry and truncated Fourier representation of coefficients.

The periodicity cell is (0, 2pi]^d and the reduced wavenumbers (Brillouin
zone) live in (-1/2, 1/2]^d.  Coefficients such as the potential V or the
nonlinearity weight sigma are stored spectrally (Fourier coefficients on
{-N..N}^d) and sampled on demand, so the Galerkin band solver and the
split-step solver consume the same source of truth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasError, RealityError

REALITY_TOL = 1e-12  # double-precision roundoff scale


def freq_range(n: int) -> np.ndarray:
    """Integer frequencies f with -n/2 < f <= n/2, in ascending order."""
    return np.arange(-((n - 1) // 2), n // 2 + 1)


@dataclass(frozen=True)
class Lattice:
    """Computational box made of M_j cells of P points each per dimension.

    The grid spacing dx = 2pi/P divides the cell exactly; the box length in
    dimension j is 2pi*M_j.  Immutable and safe to share across workers.
    """

    dim: int
    cell_points: int                 # P, points per 2pi cell
    num_cells: tuple[int, ...] | int = 1  # M_j, cells per dimension

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.cell_points < 4:
            raise ValueError("cell_points must be >= 4")
        M = self.num_cells
        if isinstance(M, int):
            M = (M,) * self.dim
        if len(M) != self.dim:
            raise ValueError("num_cells must have one entry per dimension")
        if any(m < 1 for m in M):
            raise ValueError("num_cells entries must be >= 1")
        object.__setattr__(self, "num_cells", tuple(int(m) for m in M))

    @property
    def dx(self) -> float:
        return 2 * np.pi / self.cell_points

    @property
    def box_points(self) -> tuple[int, ...]:
        return tuple(m * self.cell_points for m in self.num_cells)

    @property
    def box_lengths(self) -> tuple[float, ...]:
        return tuple(2 * np.pi * m for m in self.num_cells)

    def cell_axes(self) -> list[np.ndarray]:
        """Cell-local grid coordinates per dimension, x in [0, 2pi)."""
        x = self.dx * np.arange(self.cell_points)
        return [x] * self.dim

    def k_axes(self) -> list[np.ndarray]:
        """Reduced-wavenumber grid per dimension, k = a/M_j in (-1/2, 1/2]."""
        return [freq_range(m) / m for m in self.num_cells]


@dataclass(frozen=True)
class PeriodicCoefficients:
    """One real 2pi-periodic coefficient as truncated Fourier data.

    coeffs has shape (2N+1,)*dim, index m+N per axis for m in {-N..N}.
    Reality of the field is encoded as Hermitian symmetry
    coeffs(-m) = conj(coeffs(m)).
    """

    dim: int
    truncation: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        expect = (2 * self.truncation + 1,) * self.dim
        if c.shape != expect:
            raise ValueError(f"coeffs shape {c.shape}, expected {expect}")
        object.__setattr__(self, "coeffs", c)
        self.check_reality()

    def check_reality(self, tol: float = REALITY_TOL) -> None:
        flipped = np.conj(self.coeffs[(slice(None, None, -1),) * self.dim])
        scale = max(np.max(np.abs(self.coeffs)), 1.0)
        if np.max(np.abs(self.coeffs - flipped)) > tol * scale:
            raise RealityError("coefficients violate Hermitian symmetry")

    def coeff(self, m) -> complex:
        """Fourier coefficient at integer multi-index m (0 outside range)."""
        m = np.atleast_1d(m)
        if np.any(np.abs(m) > self.truncation):
            return 0.0 + 0.0j
        return complex(self.coeffs[tuple(int(mj) + self.truncation for mj in m)])

    def __add__(self, offset: float) -> "PeriodicCoefficients":
        c = self.coeffs.copy()
        c[(self.truncation,) * self.dim] += offset
        return PeriodicCoefficients(self.dim, self.truncation, c)

    def __mul__(self, scale: float) -> "PeriodicCoefficients":
        return PeriodicCoefficients(self.dim, self.truncation, scale * self.coeffs)

    __rmul__ = __mul__

    @staticmethod
    def constant(dim: int, value: float) -> "PeriodicCoefficients":
        c = np.zeros((1,) * dim, dtype=complex)
        c[(0,) * dim] = value
        return PeriodicCoefficients(dim, 0, c)

    @staticmethod
    def cosprod(dim: int, amplitude: float = 1.0, offset: float = 0.0) -> "PeriodicCoefficients":
        """amplitude * prod_j cos(x_j) + offset.

        Fourier data: amplitude/2^d at every corner m in {-1,1}^d.
        """
        c = np.zeros((3,) * dim, dtype=complex)
        for corner in itertools.product((-1, 1), repeat=dim):
            c[tuple(s + 1 for s in corner)] = amplitude / 2**dim
        c[(1,) * dim] += offset
        return PeriodicCoefficients(dim, 1, c)

    @staticmethod
    def from_modes(dim: int, truncation: int, modes: dict) -> "PeriodicCoefficients":
        """Build from {multi-index: coefficient}; missing -m entries are
        filled by Hermitian symmetry."""
        N = truncation
        c = np.zeros((2 * N + 1,) * dim, dtype=complex)
        given = set()
        for m, v in modes.items():
            m = tuple(int(mj) for mj in np.atleast_1d(m))
            if any(abs(mj) > N for mj in m):
                raise ValueError(f"mode {m} outside truncation {N}")
            c[tuple(mj + N for mj in m)] = v
            given.add(m)
        for m in given:
            neg = tuple(-mj for mj in m)
            if neg not in given:
                c[tuple(mj + N for mj in neg)] = np.conj(c[tuple(mj + N for mj in m)])
        return PeriodicCoefficients(dim, truncation, c)


def sample_coefficients(pc: PeriodicCoefficients, lattice: Lattice) -> np.ndarray:
    """Real-space samples of the coefficient on one P^d cell grid.

    Uses a zero-padded inverse FFT; requires N <= P/2 - 1 so no truncated
    mode aliases onto another grid frequency.
    """
    P = lattice.cell_points
    N = pc.truncation
    if pc.dim != lattice.dim:
        raise ValueError("dimension mismatch between coefficients and lattice")
    if N > P // 2 - 1:
        raise AliasError(f"truncation N={N} too large for P={P} cell points")
    spec = np.zeros((P,) * pc.dim, dtype=complex)
    idx = np.arange(-N, N + 1)
    for m in itertools.product(idx, repeat=pc.dim):
        spec[tuple(mj % P for mj in m)] = pc.coeffs[tuple(mj + N for mj in m)]
    vals = np.fft.ifftn(spec) * P**pc.dim
    scale = max(np.max(np.abs(vals)), 1.0)
    if np.max(np.abs(vals.imag)) > REALITY_TOL * scale:
        raise RealityError("sampled coefficient has imaginary residue")
    return vals.real


def sample_on_box(pc: PeriodicCoefficients, lattice: Lattice) -> np.ndarray:
    """Cell samples tiled periodically over the full box grid."""
    cell = sample_coefficients(pc, lattice)
    return np.tile(cell, lattice.num_cells)
