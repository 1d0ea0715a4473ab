"""Solitary-wavepacket ansatz on the simulation grid and error metrics.

The approximate solution is

    u_app(x,t) = eps e^{i eps^2 t} R(eps |x - v_g t - xi|)
                 p(x) e^{i(k0.x - omega0 t)},

the standing Townes envelope in the frame moving with the group velocity,
modulating the carrier Bloch wave.  On a periodic box the displacement
x - v_g t - xi is wrapped to the nearest periodic image, so the envelope
travels with the pulse even after it crosses the box edge; this matches
the torus dynamics and lets the box be sized to the pulse diameter rather
than the drift distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .cell import Lattice
from .bands import BlochMode
from .dynamics import ComplexField, FFT_WORKERS, _xi_squared
from .errors import DomainError
from .nls import EffectiveNlsParams
from .townes import RadialProfile

ISOTROPY_RELTOL = 1e-3


@dataclass(frozen=True)
class WavepacketSpec:
    """Everything needed to evaluate u_app: scaling eps, carrier mode and
    frequency data, envelope profile, initial envelope center xi."""

    eps: float
    params: EffectiveNlsParams
    profile: RadialProfile
    mode: BlochMode
    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, float)))
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        alpha = self.params.alpha
        if self.params.isotropy_defect > ISOTROPY_RELTOL * abs(alpha):
            raise DomainError(
                f"anisotropic dispersion: defect {self.params.isotropy_defect:.3g}"
                f" exceeds {ISOTROPY_RELTOL}*|alpha|; radial envelope invalid"
            )
        if abs(self.profile.alpha - alpha) > 1e-9 * abs(alpha) or abs(
            self.profile.nu - self.params.nu
        ) > 1e-9 * abs(self.params.nu):
            raise ValueError("profile (alpha, nu) inconsistent with params")


def _displacement(ws: WavepacketSpec, field_like, t: float, wrap: bool):
    """Per-axis displacement grids x_j - v_g,j t - xi_j (wrapped if asked)."""
    lattice = field_like.lattice
    d = lattice.dim
    axes = []
    for j in range(d):
        x = field_like.box_offset[j] + lattice.dx * np.arange(lattice.box_points[j])
        w = x - ws.params.v_g[j] * t - ws.center[j]
        if wrap:
            L = lattice.box_lengths[j]
            w = (w + L / 2) % L - L / 2
        axes.append(np.reshape(w, (1,) * j + (-1,) + (1,) * (d - 1 - j)))
    return axes


def _carrier(ws: WavepacketSpec, field_like, t: float) -> np.ndarray:
    """p(x) e^{i(k0.x - omega0 t)} on the box (p tiled cell-by-cell)."""
    lattice = field_like.lattice
    d = lattice.dim
    p_box = ws.mode.on_box(lattice)
    phase = -ws.params.omega0 * t
    k0 = ws.params.k0
    total = np.zeros(lattice.box_points)
    for j in range(d):
        x = field_like.box_offset[j] + lattice.dx * np.arange(lattice.box_points[j])
        total = total + np.reshape(k0[j] * x, (1,) * j + (-1,) + (1,) * (d - 1 - j))
    return p_box * np.exp(1j * (total + phase))


def assemble_ansatz(
    ws: WavepacketSpec,
    lattice: Lattice,
    t: float,
    box_offset=None,
    wrap: bool = True,
    real_part: bool = False,
) -> ComplexField:
    """Evaluate u_app on the box grid at time t.

    The box offset must be cell-commensurate (integer multiple of 2pi) so
    the carrier tiles exactly.  real_part=True returns 2 Re(u_app), the
    real-field variant used by second-order wave models.
    """
    d = lattice.dim
    if box_offset is None:
        box_offset = np.zeros(d)
    box_offset = np.asarray(box_offset, dtype=float)
    if np.max(np.abs(box_offset / (2 * np.pi) - np.round(box_offset / (2 * np.pi)))) > 1e-12:
        raise ValueError("box_offset must be an integer multiple of 2pi per axis")
    holder = ComplexField(np.zeros(lattice.box_points, complex), lattice, box_offset, t)
    w = _displacement(ws, holder, t, wrap)
    r = np.sqrt(sum(wj**2 for wj in w))
    env = ws.profile.extended(ws.eps * r)
    vals = ws.eps * np.exp(1j * ws.eps**2 * t) * env * _carrier(ws, holder, t)
    if real_part:
        vals = 2 * np.real(vals).astype(complex)
    return ComplexField(vals, lattice, box_offset, t)


def sup_error(u: ComplexField, ws: WavepacketSpec, t: float, wrap: bool = True) -> float:
    """max_x |u(x) - u_app(x,t)| on u's grid."""
    ua = assemble_ansatz(ws, u.lattice, t, u.box_offset, wrap)
    return float(np.max(np.abs(u.values - ua.values)))


def peak_position(u: ComplexField) -> np.ndarray:
    """Grid coordinates of the |u| maximum."""
    idx = np.unravel_index(int(np.argmax(np.abs(u.values))), u.values.shape)
    return u.box_offset + u.lattice.dx * np.asarray(idx, dtype=float)


@dataclass
class ErrorSeries:
    """Time series of approximation diagnostics recorded during a run.

    Use as an observer: pass to strang_evolve and it appends one record
    per invocation.
    """

    ws: WavepacketSpec
    wrap: bool = True
    times: list = field(default_factory=list)
    sup_error: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    peak_positions: list = field(default_factory=list)

    def __call__(self, u: ComplexField):
        self.times.append(u.time)
        self.sup_error.append(sup_error(u, self.ws, u.time, self.wrap))
        self.mass.append(u.mass)
        self.peak_positions.append(peak_position(u))

    @property
    def max_sup_error(self) -> float:
        return float(np.max(self.sup_error))


def gp_residual(
    ws: WavepacketSpec,
    lattice: Lattice,
    t: float,
    potential: np.ndarray,
    nonlinearity: np.ndarray,
    box_offset=None,
    wrap: bool = True,
) -> float:
    """Sup norm of the GP residual i d_t u_app + Lap u_app - V u_app
    - sigma |u_app|^2 u_app.

    d_t is exact (differentiating the ansatz formula: frequency terms plus
    the envelope advection -v_g . grad R); the Laplacian is spectral on the
    box.  potential/nonlinearity are V and sigma sampled on the box grid.
    """
    ua = assemble_ansatz(ws, lattice, t, box_offset, wrap)
    u = ua.values
    eps = ws.eps
    # frequency part of d_t: (i eps^2 - i omega0) u
    dudt = 1j * (eps**2 - ws.params.omega0) * u
    # advection part: eps * d/dt R(eps r) = -eps^2 R'(eps r) (v_g . w)/r
    w = _displacement(ws, ua, t, wrap)
    r = np.sqrt(sum(wj**2 for wj in w))
    rsafe = np.where(r == 0, 1.0, r)
    vw = sum(ws.params.v_g[j] * wj for j, wj in enumerate(w)) / rsafe
    dR = ws.profile.extended(eps * r, order=1)
    dudt += (
        -(eps**2)
        * dR
        * np.where(r == 0, 0.0, vw)
        * np.exp(1j * eps**2 * t)
        * _carrier(ws, ua, t)
    )
    lap = scipy.fft.ifftn(
        -_xi_squared(lattice) * scipy.fft.fftn(u, workers=FFT_WORKERS),
        workers=FFT_WORKERS,
    )
    res = 1j * dudt + lap - potential * u - nonlinearity * np.abs(u) ** 2 * u
    return float(np.max(np.abs(res)))
