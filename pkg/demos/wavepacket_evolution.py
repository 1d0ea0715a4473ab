"""One wavepacket run at eps = 0.25: assemble the solitary ansatz, evolve the
Gross-Pitaevskii equation to t = 1/eps^2, and watch the sup-norm error and
mass.  Takes about a minute.

Run:  python demos/wavepacket_evolution.py
Writes wavepacket_slices.svg and wavepacket_error.svg next to this script.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from blochnls import StepperConfig, WavepacketSpec, assemble_ansatz, strang_evolve
from blochnls.study import build_pipeline, load_config, study_lattice, _snap_t_end
from blochnls.wavepacket import ErrorSeries
from blochnls.plots import wavepacket_slices_figure

HERE = Path(__file__).parent
EPS = 0.25

cfg = load_config(HERE.parent / "cfg" / "study.ini")
spec, params, mode, profile = build_pipeline(cfg)
lattice = study_lattice(cfg, EPS)
t_end = _snap_t_end(1.0 / EPS**2, cfg.dt)
print(f"box: {lattice.num_cells} cells of 2pi, t_end = {t_end:g}, dt = {cfg.dt}")

offset = -np.pi * np.asarray(lattice.num_cells, dtype=float)
ws = WavepacketSpec(EPS, params, profile, mode, np.zeros(2))
u0 = assemble_ansatz(ws, lattice, 0.0, box_offset=offset)
print(f"initial mass {u0.mass:.6f}, peak |u| {np.max(np.abs(u0.values)):.4f}")

stepper = StepperConfig.from_coefficients(
    cfg.potential, cfg.nonlinearity, lattice, cfg.dt, t_end, record_every=25
)
series = ErrorSeries(ws)
uT = strang_evolve(u0, stepper, observers=[series])

print(f"max sup-norm error over [0, {t_end:g}]: {series.max_sup_error:.6f}")
print(f"relative mass drift: {abs(series.mass[-1] / series.mass[0] - 1):.2e}")

wavepacket_slices_figure(uT, ws, HERE / "wavepacket_slices.svg")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(series.times, series.sup_error, lw=1.2)
ax.set_xlabel("$t$")
ax.set_ylabel(r"$\sup_x |u - u_{\mathrm{app}}|$")
fig.tight_layout()
fig.savefig(HERE / "wavepacket_error.svg")
plt.close(fig)
print(f"wrote {HERE / 'wavepacket_slices.svg'} and wavepacket_error.svg")
