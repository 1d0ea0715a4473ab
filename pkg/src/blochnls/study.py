"""Convergence-study harness: configuration, box sizing, the eps sweep
measuring sup-norm approximation error over [0, 1/eps^2], and slope fitting.

The computational box is periodic and the envelope is evaluated at wrapped
displacements, so the pulse may drift through the box edge without leaving
its own support.  The box therefore only needs to contain the pulse
diameter plus a safety margin, not the full drift distance v_g/eps^2; this
is the 'scaled' box policy.  The 'paper' policy uses the drift-sized box
[-20pi - 5/(4 eps^2), 20pi + 5/(4 eps^2)] x [-40pi, 40pi], which is hours
of work at small eps and gated behind allow_large.
"""

from __future__ import annotations

import configparser
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bands import BlochOperatorSpec, solve_bands
from .cell import Lattice, PeriodicCoefficients
from .dynamics import ComplexField, StepperConfig, strang_evolve
from .errors import ConfigError, DomainError, NanError
from .nls import EffectiveNlsParams, effective_params
from .townes import RadialProfile, townes_shoot
from .wavepacket import ErrorSeries, WavepacketSpec, assemble_ansatz


@dataclass(frozen=True)
class StudyConfig:
    """Parsed study configuration (see README for the file schema)."""

    model: str                       # 'gp' or 'nlw-check'
    dim: int
    potential: PeriodicCoefficients       # V (GP) or chi2 (wave)
    nonlinearity: PeriodicCoefficients    # sigma (GP) or chi3 (wave)
    chi1: PeriodicCoefficients | None
    k0: np.ndarray
    n0: int
    sublattice_parity: int | None
    truncation: int
    cell_points: int
    dt: float
    eps_list: tuple
    box_policy: str                  # 'paper' or 'scaled'
    box_scale: float
    t_end_policy: str                # 'one_over_eps2' or 'fixed'
    t_end_fixed: float
    envelope_cut: float              # envelope argument kept inside the box
    margin_cells: int
    record_every: int
    output_dir: str

    def __post_init__(self):
        if self.model not in ("gp", "nlw-check"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.box_policy not in ("paper", "scaled"):
            raise ConfigError(f"unknown box_policy {self.box_policy!r}")
        if self.t_end_policy not in ("one_over_eps2", "fixed"):
            raise ConfigError(f"unknown t_end_policy {self.t_end_policy!r}")
        if len(self.eps_list) and (
            np.any(np.diff(self.eps_list) >= 0)
            or min(self.eps_list) <= 0
            or max(self.eps_list) >= 1
        ):
            raise ConfigError("eps_list must be strictly decreasing within (0,1)")

    def operator_spec(self) -> BlochOperatorSpec:
        kind = "wave" if self.model == "nlw-check" else "schrodinger"
        return BlochOperatorSpec(
            self.dim,
            self.potential,
            chi1=self.chi1,
            truncation=self.truncation,
            kind=kind,
            sublattice_parity=self.sublattice_parity,
        )


def _parse_coefficient(text: str, dim: int) -> PeriodicCoefficients:
    """Coefficient spec: 'cosprod <amplitude> [+ <offset>]',
    'constant <value>', or 'modes (m..)=re[,im]; ...'."""
    text = text.strip()
    if text.startswith("cosprod"):
        rest = text[len("cosprod"):].replace("+", " ").split()
        amp = float(rest[0]) if rest else 1.0
        offset = float(rest[1]) if len(rest) > 1 else 0.0
        pc = PeriodicCoefficients.cosprod(dim, amp)
        return pc + offset if offset else pc
    if text.startswith("constant"):
        return PeriodicCoefficients.constant(dim, float(text.split()[1]))
    if text.startswith("modes"):
        entries = {}
        for item in text[len("modes"):].split(";"):
            item = item.strip()
            if not item:
                continue
            lhs, rhs = item.split("=")
            m = tuple(
                int(v) for v in lhs.strip().strip("()").split(",") if v.strip()
            )
            parts = [float(v) for v in rhs.split(",")]
            entries[m] = parts[0] + 1j * (parts[1] if len(parts) > 1 else 0.0)
        trunc = max(max(abs(mj) for mj in m) for m in entries)
        return PeriodicCoefficients.from_modes(dim, trunc, entries)
    raise ConfigError(f"cannot parse coefficient {text!r}")


def load_config(path) -> StudyConfig:
    """Read a study configuration from an INI-style file."""
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    try:
        model = cp.get("model", "kind", fallback="gp").strip().lower()
        dim = cp.getint("model", "dim", fallback=2)
        coeff = cp["coefficients"]
        potential = _parse_coefficient(coeff.get("potential"), dim)
        nonlinearity = _parse_coefficient(coeff.get("nonlinearity"), dim)
        chi1 = (
            _parse_coefficient(coeff.get("chi1"), dim)
            if coeff.get("chi1", None)
            else None
        )
        k0 = np.array([float(v) for v in cp.get("carrier", "k0").split()])
        n0 = cp.getint("carrier", "n0")
        par = cp.get("carrier", "sublattice_parity", fallback="").strip()
        sublattice_parity = int(par) if par else None
        disc = cp["discretization"] if cp.has_section("discretization") else {}
        study = cp["study"] if cp.has_section("study") else {}
        eps_list = tuple(
            float(v) for v in str(study.get("eps_list", "0.3 0.2 0.1")).split()
        )
        return StudyConfig(
            model=model,
            dim=dim,
            potential=potential,
            nonlinearity=nonlinearity,
            chi1=chi1,
            k0=k0,
            n0=n0,
            sublattice_parity=sublattice_parity,
            truncation=int(disc.get("truncation", 12)),
            cell_points=int(disc.get("cell_points", 31)),
            dt=float(disc.get("dt", 0.02)),
            eps_list=eps_list,
            box_policy=str(study.get("box_policy", "scaled")).strip(),
            box_scale=float(study.get("box_scale", 1.0)),
            t_end_policy=str(study.get("t_end_policy", "one_over_eps2")).strip(),
            t_end_fixed=float(study.get("t_end", 1.0)),
            envelope_cut=float(study.get("envelope_cut", 5.0)),
            margin_cells=int(study.get("margin_cells", 10)),
            record_every=int(study.get("record_every", 25)),
            output_dir=cp.get("output", "dir", fallback="out"),
        )
    except (KeyError, ValueError, configparser.Error) as e:
        raise ConfigError(f"invalid study configuration: {e}") from e


def _carrier_period(k0j: float) -> int:
    """Smallest M with M*k0j integer (box cells making e^{ik0 x} periodic)."""
    frac = Fraction(k0j).limit_denominator(1000)
    if abs(float(frac) - k0j) > 1e-12:
        raise ConfigError(f"carrier wavenumber {k0j} is not a small rational;"
                          " the periodic box cannot hold the carrier exactly")
    return frac.denominator


def _round_up(m: int, multiple: int) -> int:
    return ((m + multiple - 1) // multiple) * multiple


def study_lattice(cfg: StudyConfig, eps: float) -> Lattice:
    """Box size for one eps run under the configured policy.

    Cell counts are even (so the centered box offset is cell-commensurate)
    and multiples of the carrier period (so e^{ik0.x} is box-periodic).
    """
    if cfg.box_policy == "paper":
        half = (20 * np.pi + 5 / (4 * eps**2), 40 * np.pi)[: cfg.dim]
        cells = [math.ceil(h / np.pi) for h in half]  # M = 2*half/(2pi)
    else:
        half_len = cfg.box_scale * (cfg.envelope_cut / eps) + cfg.margin_cells * 2 * np.pi
        cells = [math.ceil(half_len / np.pi) for _ in range(cfg.dim)]
    M = []
    for j, m in enumerate(cells):
        mult = _carrier_period(float(cfg.k0[j]))
        mult = mult if mult % 2 == 0 else 2 * mult
        M.append(_round_up(m, mult))
    return Lattice(cfg.dim, cfg.cell_points, tuple(M))


def _snap_t_end(t: float, dt: float) -> float:
    return max(1, round(t / dt)) * dt


@dataclass
class RunRecord:
    """Per-eps metadata and diagnostics of one convergence run."""

    eps: float
    lattice_cells: tuple
    t_end: float
    dt: float
    max_sup_error: float
    final_sup_error: float
    wall_seconds: float
    failed: str = ""
    series: ErrorSeries | None = None


@dataclass
class ConvergenceReport:
    eps_list: list
    max_sup_error: list
    final_sup_error: list
    fitted_slope: float
    fit_intercept: float
    fit_residual: float
    runs: list = field(default_factory=list)


def fit_slope(eps_list, errors):
    """Least-squares line through (log eps, log error): (slope, intercept,
    rms residual)."""
    eps_list = np.asarray(eps_list, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0) or np.any(eps_list <= 0):
        raise DomainError("slope fit requires positive eps and errors")
    slope, intercept = np.polyfit(np.log(eps_list), np.log(errors), 1)
    resid = np.log(errors) - (slope * np.log(eps_list) + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def build_pipeline(cfg: StudyConfig):
    """Carrier mode, effective parameters and envelope profile shared by all
    eps runs (they are eps-independent, so computed once)."""
    spec = cfg.operator_spec()
    params = effective_params(spec, cfg.k0, cfg.n0, cfg.nonlinearity)
    mode = solve_bands(spec, cfg.k0, cfg.n0, check_simple_at=cfg.n0)[cfg.n0 - 1]
    # tabulate the envelope far enough to cover any wrapped box corner
    profile = townes_shoot(cfg.dim, alpha=params.alpha, nu=params.nu, r_max=60.0)
    return spec, params, mode, profile


def run_convergence(cfg: StudyConfig, allow_large: bool = False) -> ConvergenceReport:
    """Run the eps sweep and fit the error slope.

    Each run starts from u(0) = u_app(0) and records the sup-norm error
    against the ansatz up to t_end.  A NanError in one run is recorded and
    the sweep continues (partial report).
    """
    if cfg.model != "gp":
        raise ConfigError("convergence study requires model = gp")
    if not cfg.eps_list:
        raise ConfigError("empty eps_list")
    if cfg.box_policy == "paper" and not allow_large:
        raise ConfigError(
            "box_policy = paper is hours of work at small eps;"
            " pass allow_large to run it"
        )
    spec, params, mode, profile = build_pipeline(cfg)
    runs = []
    for eps in cfg.eps_list:
        lattice = study_lattice(cfg, eps)
        t_end = (
            _snap_t_end(1.0 / eps**2, cfg.dt)
            if cfg.t_end_policy == "one_over_eps2"
            else _snap_t_end(cfg.t_end_fixed, cfg.dt)
        )
        offset = -np.pi * np.asarray(lattice.num_cells, dtype=float)  # centered box
        ws = WavepacketSpec(eps, params, profile, mode, np.zeros(cfg.dim))
        u0 = assemble_ansatz(ws, lattice, 0.0, box_offset=offset)
        stepper = StepperConfig.from_coefficients(
            cfg.potential, cfg.nonlinearity, lattice, cfg.dt, t_end,
            record_every=cfg.record_every,
        )
        series = ErrorSeries(ws)
        start = time.perf_counter()
        try:
            strang_evolve(u0, stepper, observers=[series])
            failed = ""
        except NanError as e:
            failed = str(e)
        wall = time.perf_counter() - start
        have = bool(series.sup_error)
        runs.append(
            RunRecord(
                eps, lattice.num_cells, t_end, cfg.dt,
                series.max_sup_error if have else float("nan"),
                series.sup_error[-1] if have else float("nan"),
                wall, failed, series,
            )
        )
    ok = [r for r in runs if not r.failed]
    if len(ok) >= 2:
        slope, intercept, resid = fit_slope(
            [r.eps for r in ok], [r.max_sup_error for r in ok]
        )
    else:
        slope = intercept = resid = float("nan")
    return ConvergenceReport(
        [r.eps for r in runs],
        [r.max_sup_error for r in runs],
        [r.final_sup_error for r in runs],
        slope, intercept, resid, runs,
    )


def emit_report(report: ConvergenceReport, out_dir) -> list:
    """Write convergence.csv, convergence.svg and metadata.txt; returns the
    written paths.  Output is deterministic for identical inputs."""
    if not report.eps_list:
        raise ConfigError("empty report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "convergence.csv"
    with open(csv_path, "w") as f:
        f.write("eps,max_sup_error,final_sup_error\n")
        for e, m, fin in zip(
            report.eps_list, report.max_sup_error, report.final_sup_error
        ):
            f.write(f"{e!r},{m!r},{fin!r}\n")
    from .plots import convergence_figure

    svg_path = out / "convergence.svg"
    convergence_figure(report, svg_path)
    meta_path = out / "metadata.txt"
    with open(meta_path, "w") as f:
        f.write(f"fitted_slope: {report.fitted_slope!r}\n")
        f.write(f"fit_intercept: {report.fit_intercept!r}\n")
        f.write(f"fit_residual: {report.fit_residual!r}\n")
        for r in report.runs:
            f.write(
                f"run eps={r.eps} cells={r.lattice_cells} t_end={r.t_end}"
                f" dt={r.dt} max_err={r.max_sup_error!r}"
                f" final_err={r.final_sup_error!r} wall_s={r.wall_seconds:.1f}"
                + (f" FAILED: {r.failed}" if r.failed else "")
                + "\n"
            )
    return [csv_path, svg_path, meta_path]
