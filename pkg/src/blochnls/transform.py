"""Discrete Bloch transform on cell-commensurate box grids.

A field on a box of M cells (P points each) per dimension is decomposed
into cell-periodic profiles parametrized by reduced wavenumbers on an
M-point grid in (-1/2, 1/2].  Every box frequency f splits uniquely as
f = a + m*M with the reduced index a in (-M/2, M/2] and the integer
cell-frequency m in (-P/2, P/2], so the transform

    bloch(u)(x, k_a) = sum_m uhat(k_a + m) exp(i m . x)

is an exact regrouping of the full-box DFT and inverts exactly:

    u(x) = sum_a bloch(u)(x mod cell, k_a) exp(i k_a . x).

Shifting k by a full period e_j multiplies the x-profile by exp(-i x_j),
and the transform commutes with multiplication by cell-periodic functions;
both identities hold on the grid to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cell import Lattice, freq_range


@dataclass(frozen=True)
class BlochField:
    """Transformed field; values indexed [x axes..., k axes...].

    values.shape == (P,)*d + (M_1, ..., M_d); axis order within each group
    follows the spatial dimensions.  k axes are ordered by freq_range(M).
    """

    values: np.ndarray = field(repr=False)
    lattice: Lattice

    def __post_init__(self):
        d = self.lattice.dim
        P = self.lattice.cell_points
        expect = (P,) * d + self.lattice.num_cells
        if self.values.shape != expect:
            raise ValueError(f"values shape {self.values.shape}, expected {expect}")

    def profile(self, k_index: tuple[int, ...] | int) -> np.ndarray:
        """Cell profile at one reduced-wavenumber grid index."""
        if isinstance(k_index, int):
            k_index = (k_index,)
        return self.values[(Ellipsis,) + tuple(k_index)]


def _split_axis(u: np.ndarray, axis: int, M: int, P: int) -> np.ndarray:
    """One-dimensional regrouping: box axis of length M*P -> (P, M) axes.

    Output index pair (p, a): profile point p, reduced index a (order of
    freq_range(M)).
    """
    Q = M * P
    uhat = np.fft.fft(u, axis=axis) / Q
    a = freq_range(M)
    m = freq_range(P)
    # coefficient at box frequency a + m*M for each (m, a); the exponential
    # exp(i m x_p) is P-periodic in m on the cell grid, so the FFT output can
    # be addressed mod Q without fixing a frequency window
    gather = (m[:, None] * M + a[None, :]) % Q  # (P, M)
    uhat = np.take(uhat, gather.ravel(), axis=axis)
    uhat = np.moveaxis(uhat, axis, -1)
    uhat = uhat.reshape(uhat.shape[:-1] + (P, M))
    # sum_m c_m exp(i m x_p): inverse DFT over the m axis
    x = 2 * np.pi * np.arange(P) / P
    dft = np.exp(1j * np.outer(x, m))  # (p, m)
    out = np.tensordot(uhat, dft, axes=([-2], [1]))  # (..., M, p)
    out = np.moveaxis(out, -1, -2)  # (..., p, M)
    # profile axis back where the box axis was; k axis stays at the end
    return np.moveaxis(out, -2, axis)


def _merge_axis(bf: np.ndarray, xaxis: int, kaxis: int, M: int, P: int) -> np.ndarray:
    """Inverse of _split_axis: (p, a) axes -> one box axis of length M*P."""
    a = freq_range(M)
    Q = M * P
    p = np.arange(P)
    # u(c*P + p) = sum_a v(p, a) exp(2 pi i a (c P + p)/Q)
    twiddle = np.exp(2j * np.pi * np.outer(p, a) / Q)  # (p, a)
    v = np.moveaxis(bf, (xaxis, kaxis), (-2, -1)) * twiddle
    phase = np.exp(2j * np.pi * np.outer(np.arange(M), a) / M)  # (c, a)
    u = np.tensordot(v, phase, axes=([-1], [1]))  # (..., p, c)
    u = np.moveaxis(u, -1, -2)  # (..., c, p)
    u = u.reshape(u.shape[:-2] + (Q,))
    return np.moveaxis(u, -1, xaxis)


def bloch_transform(values: np.ndarray, lattice: Lattice) -> BlochField:
    """Discrete Bloch transform of a full-box field."""
    if values.shape != lattice.box_points:
        raise ValueError(f"field shape {values.shape} != box {lattice.box_points}")
    d = lattice.dim
    P = lattice.cell_points
    out = np.asarray(values, dtype=complex)
    # splitting axis j leaves the profile axis in place and appends the
    # reduced-wavenumber axis at the end, so spatial axes stay in front
    for j in range(d):
        out = _split_axis(out, axis=j, M=lattice.num_cells[j], P=P)
    return BlochField(out, lattice)


def bloch_inverse(bf: BlochField) -> np.ndarray:
    """Reconstruct the box field, inverse of bloch_transform."""
    lat = bf.lattice
    d = lat.dim
    out = bf.values
    for j in reversed(range(d)):
        out = _merge_axis(out, xaxis=j, kaxis=d + j, M=lat.num_cells[j], P=lat.cell_points)
        # merged axis replaces the x axis; drop the consumed k axis position
    return out


def quasiperiodic_shift(bf: BlochField, j: int) -> np.ndarray:
    """Profiles evaluated at k + e_j: equal to exp(-i x_j) * profiles at k.

    Returns the shifted values array for comparison in property checks;
    the k grid itself is unchanged (1-periodic bookkeeping).
    """
    lat = bf.lattice
    x = 2 * np.pi * np.arange(lat.cell_points) / lat.cell_points
    shape = [1] * bf.values.ndim
    shape[j] = lat.cell_points
    return bf.values * np.exp(-1j * x).reshape(shape)
