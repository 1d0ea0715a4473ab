"""Command-line surface: bands, coeffs, soliton, simulate, converge, nonres.

Every subcommand reads a study configuration file (--config) and writes its
artifacts under --out.  Exit codes: 0 success, 2 configuration/validation
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bands import band_structure, check_nonresonance, k_path, solve_bands
from .dynamics import StepperConfig, strang_evolve
from .errors import BlochnlsError, ConfigError
from .study import (
    StudyConfig,
    build_pipeline,
    emit_report,
    load_config,
    run_convergence,
    study_lattice,
)
from .townes import townes_shoot
from .wavepacket import ErrorSeries, WavepacketSpec, assemble_ansatz


def _out_dir(args, cfg: StudyConfig) -> Path:
    out = Path(args.out if args.out else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_bands(args, cfg: StudyConfig) -> int:
    spec = cfg.operator_spec()
    ks, arclength, ticks = k_path(args.path, cfg.dim, args.points)
    table = band_structure(spec, ks, args.nmax, arclength=arclength, ticks=ticks)
    out = _out_dir(args, cfg)
    csv = out / "bands.csv"
    with open(csv, "w") as f:
        kcols = ",".join(f"k_{j + 1}" for j in range(cfg.dim))
        f.write(kcols + "," + ",".join(f"lambda_{n + 1}" for n in range(args.nmax)) + "\n")
        for k, lam in zip(table.k_grid, table.bands):
            f.write(",".join(repr(float(v)) for v in k) + ","
                    + ",".join(repr(float(v)) for v in lam) + "\n")
    from .plots import band_figure

    band_figure(table, out / "bands.svg")
    print(f"wrote {csv} and bands.svg ({len(ks)} k points, {args.nmax} bands)")
    return 0


def cmd_coeffs(args, cfg: StudyConfig) -> int:
    _, params, _, _ = build_pipeline(cfg)
    print(f"omega0           = {params.omega0:.10g}")
    print("v_g              = (" + ", ".join(f"{v:.10g}" for v in params.v_g) + ")")
    print("hessian          =")
    for row in params.hessian:
        print("    [" + ", ".join(f"{v: .10g}" for v in row) + "]")
    print(f"nu               = {params.nu:.10g}")
    print(f"alpha            = {params.alpha:.10g}")
    print(f"isotropy_defect  = {params.isotropy_defect:.3g}")
    out = _out_dir(args, cfg)
    with open(out / "coeffs.txt", "w") as f:
        f.write(
            "{\n"
            f"  'omega0': {params.omega0!r},\n"
            f"  'v_g': {[float(v) for v in params.v_g]!r},\n"
            f"  'hessian': {[[float(v) for v in r] for r in params.hessian]!r},\n"
            f"  'nu': {params.nu!r},\n"
            f"  'alpha': {params.alpha!r},\n"
            f"  'isotropy_defect': {params.isotropy_defect!r},\n"
            "}\n"
        )
    return 0


def cmd_soliton(args, cfg: StudyConfig) -> int:
    if args.canonical:
        profile = townes_shoot(cfg.dim, r_max=args.rmax)
    else:
        _, params, _, _ = build_pipeline(cfg)
        profile = townes_shoot(cfg.dim, alpha=params.alpha, nu=params.nu,
                               r_max=args.rmax)
    out = _out_dir(args, cfg)
    csv = out / "soliton.csv"
    with open(csv, "w") as f:
        f.write("r,R\n")
        for r, v in zip(profile.r_grid, profile.R):
            f.write(f"{float(r)!r},{float(v)!r}\n")
    from .plots import soliton_figure

    soliton_figure(profile, out / "soliton.svg")
    print(f"R(0) = {profile.R0:.12g}  (alpha={profile.alpha:g}, nu={profile.nu:g})")
    print(f"wrote {csv} and soliton.svg")
    return 0


def cmd_simulate(args, cfg: StudyConfig) -> int:
    if cfg.model != "gp":
        raise ConfigError("simulate requires model = gp")
    eps = args.eps
    spec, params, mode, profile = build_pipeline(cfg)
    lattice = study_lattice(cfg, eps)
    t_end = args.t_end if args.t_end else round(1.0 / eps**2 / cfg.dt) * cfg.dt
    offset = -np.pi * np.asarray(lattice.num_cells, dtype=float)
    ws = WavepacketSpec(eps, params, profile, mode, np.zeros(cfg.dim))
    u0 = assemble_ansatz(ws, lattice, 0.0, box_offset=offset)
    stepper = StepperConfig.from_coefficients(
        cfg.potential, cfg.nonlinearity, lattice, cfg.dt, t_end,
        record_every=cfg.record_every,
    )
    series = ErrorSeries(ws)
    uT = strang_evolve(u0, stepper, observers=[series])
    out = _out_dir(args, cfg)
    csv = out / "errors.csv"
    with open(csv, "w") as f:
        cols = "t,sup_error,mass," + ",".join(
            f"peak_x{j + 1}" for j in range(cfg.dim)
        )
        f.write(cols + "\n")
        for t, e, m, p in zip(series.times, series.sup_error, series.mass,
                              series.peak_positions):
            f.write(f"{t!r},{e!r},{m!r},"
                    + ",".join(repr(float(v)) for v in p) + "\n")
    snap = out / "snapshot.csv"
    with open(snap, "w") as f:
        # |u| on a decimated grid (at most ~256 points per axis)
        stride = [max(1, n // 256) for n in lattice.box_points]
        f.write(f"# t={uT.time!r} dx={lattice.dx!r}"
                f" box_points={tuple(lattice.box_points)}"
                f" box_offset={tuple(float(v) for v in uT.box_offset)}"
                f" stride={tuple(stride)}\n")
        dec = np.abs(uT.values[tuple(slice(None, None, s) for s in stride)])
        if cfg.dim == 1:
            for v in dec:
                f.write(f"{float(v)!r}\n")
        else:
            for row in dec:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
    from .plots import wavepacket_slices_figure

    wavepacket_slices_figure(uT, ws, out / "final_slices.svg")
    print(f"eps={eps}: max sup error {series.max_sup_error:.6g} over [0, {t_end:g}]")
    print(f"wrote {csv}, {snap} and final_slices.svg")
    return 0


def cmd_converge(args, cfg: StudyConfig) -> int:
    report = run_convergence(cfg, allow_large=args.allow_large)
    out = _out_dir(args, cfg)
    emit_report(report, out)
    for r in report.runs:
        status = f"FAILED ({r.failed})" if r.failed else f"max_err={r.max_sup_error:.6g}"
        print(f"  eps={r.eps}: cells={r.lattice_cells} t_end={r.t_end:g}"
              f" wall={r.wall_seconds:.0f}s {status}")
    print(f"fitted slope: {report.fitted_slope:.4f}"
          f" (rms log residual {report.fit_residual:.3g})")
    if any(r.failed for r in report.runs):
        return 3
    return 0


def cmd_nonres(args, cfg: StudyConfig) -> int:
    spec = cfg.operator_spec()
    if spec.kind != "wave":
        raise ConfigError("nonres requires model = nlw-check")
    result = check_nonresonance(spec, cfg.k0, cfg.n0, n_scan=args.nscan)
    print(f"nonresonance margin {result.margin:.10g}"
          f" attained at (n, j) = {result.argmin} (scanned |n| <= {result.n_scan})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="blochnls",
        description="Bloch-band / effective-NLS wavepacket toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="study configuration file")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(fn=fn)
        return p

    p = add("bands", cmd_bands)
    p.add_argument("--path", default="GXMG", help="k path through corner labels")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--points", type=int, default=40, help="points per path segment")
    add("coeffs", cmd_coeffs)
    p = add("soliton", cmd_soliton)
    p.add_argument("--rmax", type=float, default=16.0)
    p.add_argument("--canonical", action="store_true",
                   help="canonical alpha=2, nu=1 profile instead of the study's")
    p = add("simulate", cmd_simulate)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--t-end", type=float, default=None)
    p = add("converge", cmd_converge)
    p.add_argument("--allow-large", action="store_true",
                   help="permit the drift-sized (paper) box policy")
    p = add("nonres", cmd_nonres)
    p.add_argument("--nscan", type=int, default=64)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.fn(args, cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except BlochnlsError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
