"""Ground-state radial profile of the focusing NLS by shooting.

The standing-wave ansatz A = e^{iT} R(|W|) in the effective NLS with
isotropic dispersion alpha reduces to the radial boundary-value problem

    (alpha/2) (R'' + (d-1) R'/r) - R + nu R^3 = 0,
    R'(0) = 0,  R > 0,  R(r) -> 0  (r -> inf).

Everything scales back to the canonical equation (alpha = 2, nu = 1)

    Rc'' + (d-1) Rc'/r - Rc + Rc^3 = 0

via R(r) = nu^{-1/2} Rc(r sqrt(2/alpha)).  In d = 1 the canonical solution
is sqrt(2) sech(r); in d = 2 it is the Townes profile, found here by
bisecting on Rc(0): too-large initial values drive R through zero
(overshoot), too-small ones make R' turn back positive (undershoot).

Trajectories leave the stable manifold like delta * e^{r}, so a bracket of
width ~1e-13 keeps the profile faithful out to r ~ 20.  Beyond a trust
radius the tabulated values switch to the matched decaying solution of the
linearized equation (c e^{-r} in d=1, c K_0(r) in d=2), whose ODE residual
is only the negligible cubic term ~R^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.special import k0 as bessel_k0

from .errors import BracketError, ProfileRangeError

_SERIES_H = 1e-6        # hand off from the r=0 Taylor series to the ODE
_CLASSIFY_END = 25.0    # domain on which shots are classified
_TRUST_RADIUS = 9.0     # ODE values kept up to here; asymptote beyond
_BRACKET_D2 = (2.0, 2.5)


@dataclass(frozen=True)
class RadialProfile:
    """Tabulated decaying radial solution with spline evaluation.

    r_trust marks where tabulation switches from the integrated trajectory
    to the matched exponential asymptote.  Calls outside [0, r_max] raise
    ProfileRangeError rather than extrapolate silently.
    """

    dim: int
    alpha: float
    nu: float
    r_grid: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    R0: float
    r_trust: float
    _spline: CubicSpline = field(repr=False, compare=False)

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])

    def extended(self, r, order: int = 0):
        """Profile (or its order-th derivative) extended by zero beyond
        r_max; refuses the extension when the tabulated tail has not yet
        decayed below 1e-10."""
        r = np.asarray(r, dtype=float)
        inside = r <= self.r_max
        if not np.all(inside) and self.R[-1] > 1e-10:
            raise ProfileRangeError(
                f"zero extension invalid: R(r_max) = {self.R[-1]:.3g} > 1e-10"
            )
        out = np.zeros(r.shape)
        out[inside] = self._spline(r[inside], order) if order else self._spline(r[inside])
        return out

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.r_max):
            raise ProfileRangeError(
                f"radius outside tabulated range [0, {self.r_max:g}]"
            )
        return self._spline(r)

    def derivative(self, r, order: int = 1):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0) or np.any(r > self.r_max):
            raise ProfileRangeError(
                f"radius outside tabulated range [0, {self.r_max:g}]"
            )
        return self._spline(r, order)

    def ode_residual(self, r) -> np.ndarray:
        """(alpha/2)(R'' + (d-1)R'/r) - R + nu R^3 via spline derivatives."""
        r = np.asarray(r, dtype=float)
        R = self(r)
        d1 = self.derivative(r, 1)
        d2 = self.derivative(r, 2)
        return 0.5 * self.alpha * (d2 + (self.dim - 1) * d1 / r) - R + self.nu * R**3


def _shoot(dim: int, R0: float, r_end: float, events=None, t_eval=None):
    d = dim

    def rhs(r, y):
        R, Rp = y
        return (Rp, R - R**3 - (d - 1) * Rp / r)

    # second-order series start avoids the coordinate singularity at r = 0
    h = _SERIES_H
    y0 = (R0 + h * h * (R0 - R0**3) / (2 * d), h * (R0 - R0**3) / d)
    return solve_ivp(
        rhs, (h, r_end), y0, method="DOP853", rtol=1e-12, atol=1e-14,
        events=events, t_eval=t_eval, dense_output=False,
    )


def _classify(dim: int, R0: float) -> int:
    """+1 overshoot (R reaches 0), -1 undershoot (R' turns positive),
    0 neither on the classification domain."""

    def hit_zero(r, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    def turn_back(r, y):
        return y[1]

    turn_back.terminal = True
    turn_back.direction = 1

    sol = _shoot(dim, R0, _CLASSIFY_END, events=(hit_zero, turn_back))
    if sol.t_events[0].size:
        return 1
    if sol.t_events[1].size:
        return -1
    return 0


@lru_cache(maxsize=None)
def _canonical_peak(dim: int) -> float:
    """Initial value Rc(0) of the canonical ground state, by bisection."""
    if dim == 1:
        return float(np.sqrt(2.0))
    lo, hi = _BRACKET_D2 if dim == 2 else (1.0, 6.0)
    if _classify(dim, lo) != -1 or _classify(dim, hi) != 1:
        # widen until the bracket straddles the ground state
        for _ in range(40):
            if _classify(dim, lo) == -1:
                break
            lo *= 0.8
        for _ in range(40):
            if _classify(dim, hi) == 1:
                break
            hi *= 1.25
        if _classify(dim, lo) != -1 or _classify(dim, hi) != 1:
            raise BracketError(f"could not bracket the ground state in d={dim}")
    while hi - lo > 5e-14:
        mid = 0.5 * (lo + hi)
        side = _classify(dim, mid)
        if side == 0:           # indistinguishable from the ground state
            return mid
        if side > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _canonical_table(dim: int, r_trust: float = _TRUST_RADIUS):
    """Dense canonical profile on [0, r_trust] plus the matched tail
    constant c with Rc ~ c r^{-(d-1)/2} e^{-r}."""
    R0 = _canonical_peak(dim)
    if dim == 1:
        r = np.linspace(0.0, r_trust, 18001)
        vals = np.sqrt(2.0) / np.cosh(r)
        c = vals[-1] * np.exp(r_trust)
        return r, vals, c
    r = np.linspace(_SERIES_H, r_trust, 18001)
    sol = _shoot(dim, R0, r_trust, t_eval=r)
    vals = sol.y[0]
    r = np.concatenate([[0.0], r])
    vals = np.concatenate([[R0], vals])
    c = vals[-1] / bessel_k0(r_trust)
    return r, vals, float(c)


def townes_shoot(
    dim: int, alpha: float = 2.0, nu: float = 1.0, r_max: float = 16.0
) -> RadialProfile:
    """Decaying ground-state profile of
    (alpha/2)(R'' + (d-1)R'/r) - R + nu R^3 = 0 on [0, r_max].

    Solved once in canonical variables and rescaled; requires alpha > 0 and
    nu > 0 (focusing).
    """
    if alpha <= 0 or nu <= 0:
        raise ValueError("need alpha > 0 and nu > 0 for a focusing ground state")
    rc, vc, c = _canonical_table(dim)
    scale = np.sqrt(2.0 / alpha)        # canonical radius per physical radius
    r_trust = rc[-1] / scale
    r_core = rc / scale
    v_core = vc / np.sqrt(nu)
    if r_max <= r_trust:
        keep = r_core <= r_max
        r_all, v_all = r_core[keep], v_core[keep]
        r_trust = float(r_all[-1])
    else:
        r_tail = np.linspace(r_trust, r_max, max(64, int((r_max - r_trust) * 400)))[1:]
        rho = r_tail * scale
        decay = np.exp(-rho) if dim == 1 else bessel_k0(rho)
        v_tail = c * decay / np.sqrt(nu)
        r_all = np.concatenate([r_core, r_tail])
        v_all = np.concatenate([v_core, v_tail])
    spline = CubicSpline(r_all, v_all, bc_type=((1, 0.0), "not-a-knot"))
    return RadialProfile(dim, float(alpha), float(nu), r_all, v_all,
                         float(v_all[0]), float(r_trust), spline)
