"""Figure-reproduction experiments that write CSV tables and plot scripts.

Each experiment writes ``<name>.csv`` and a standalone ``<name>_plot.py``
into the output directory. Floats are written with 17 significant digits
and rows always follow grid order, whatever the worker count.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .beam import PhaseProfile
from .config import ScenarioConfig
from .gml import PE_PRESETS, average_gml, to_db
from .montecarlo import mc_average_gml
from .numerics import gauss_laguerre
from .scenario import LinkState

DEFAULT_PHI_GRID_DEG = tuple(float(d) for d in range(0, 69))
SCINTILLATION_PHI_GRID_DEG = tuple(float(d) for d in range(0, 81))
F_GRID_POINTS = 60
F_GRID_SPAN = 100.0
BATTERY_PHI_DEG = (0.0, 30.0, 60.0)
BATTERY_PE = ("weak", "moderate", "strong")
BATTERY_QPS_FOCUS_M = 300.0
Z_LIMIT = 3.0


class ValidationFailure(Exception):
    """An internal cross-check (Monte Carlo against closed form) failed."""


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: list[tuple]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, table: Table) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])


def parse_grid(spec: str) -> tuple[float, ...]:
    """Parse ``start:stop:step`` (stop inclusive) in degrees."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if not step > 0 or stop < start:
        raise ValueError(f"grid needs step > 0 and stop >= start, got {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def focus_grid(f_min: float, d2: float, points: int = F_GRID_POINTS) -> np.ndarray:
    """Log-spaced QPS focus distances from ``f_min`` to ``100 * d2``."""
    grid = np.geomspace(f_min, F_GRID_SPAN * d2, points)
    grid[0] = f_min
    return grid


def _pmap(fn: Callable, items: Sequence, workers: int | None) -> list:
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _profiles(cfg: ScenarioConfig) -> list[PhaseProfile]:
    out = [PhaseProfile.lps(), PhaseProfile.fps()]
    if cfg.phase_profile.kind == "QPS":
        out.append(cfg.phase_profile)
    return out


def exp_scintillation(cfg, phis, workers):
    sc = cfg.scenario()

    def row(phi):
        st = sc.at(math.radians(phi))
        return (phi, st.geom.d1, st.sigma_R1_sq, st.scintillation)

    return Table(("phi_i_deg", "d1_m", "sigma_R1_sq", "sigma_I2"), _pmap(row, phis, workers))


def exp_beamwidths(cfg, phis, workers):
    sc = cfg.scenario()
    profiles = _profiles(cfg)

    def rows(phi):
        st = sc.at(math.radians(phi))
        out = []
        for p in profiles:
            rx = st.widths(p)
            g = st.gml_deterministic(p)
            out.append(
                (phi, p.label, st.boris.w_d1, st.boris.w_ix, st.boris.w_iy, st.boris.fits_oris,
                 st.rho0, rx.epsilon, rx.w_rx_x, rx.w_rx_y, g, to_db(g))
            )
        return out

    header = ("phi_i_deg", "profile", "w_d1_m", "w_ix_m", "w_iy_m", "fits_oris", "rho0_m", "epsilon",
              "w_rx_x_m", "w_rx_y_m", "gml_det_linear", "gml_det_db")
    return Table(header, [r for rs in _pmap(rows, phis, workers) for r in rs])


def exp_gml_fixed(cfg, phis, workers):
    sc = cfg.scenario()
    profiles = _profiles(cfg)
    hover = cfg.hover

    def rows(phi):
        st = sc.at(math.radians(phi))
        out = []
        for p in profiles:
            rx = st.widths(p)
            g = average_gml(rx, hover, cfg.aperture_radius_m)
            out.append((phi, p.label, cfg.pe_preset, rx.w_rx_x, rx.w_rx_y, g, to_db(g)))
        return out

    header = ("phi_i_deg", "profile", "pe_preset", "w_rx_x_m", "w_rx_y_m", "gml_linear", "gml_db")
    return Table(header, [r for rs in _pmap(rows, phis, workers) for r in rs])


def exp_gml_qps_map(cfg, phis, workers):
    sc = cfg.scenario()
    hover = cfg.hover

    def rows(phi):
        st = sc.at(math.radians(phi))
        out = []
        for f in focus_grid(st.geom.f_min, st.geom.d2):
            g = st.gml(PhaseProfile.qps(float(f)), hover)
            out.append((phi, float(f), g, to_db(g)))
        return out

    header = ("phi_i_deg", "f_m", "gml_linear", "gml_db")
    return Table(header, [r for rs in _pmap(rows, phis, workers) for r in rs])


def exp_skr_fixed(cfg, phis, workers):
    sc = cfg.scenario()
    profiles = _profiles(cfg)
    hover = cfg.hover

    def rows(phi):
        st = sc.at(math.radians(phi))
        out = []
        for p in profiles:
            b = st.budget(p, hover)
            out.append((phi, p.label, cfg.pe_preset, b.sigma_R_sq, b.tau_l, b.tau_p, st.skr(p, hover)))
        return out

    header = ("phi_i_deg", "profile", "pe_preset", "sigma_R_sq", "tau_l", "tau_p", "skr_bits_per_use")
    return Table(header, [r for rs in _pmap(rows, phis, workers) for r in rs])


def exp_skr_qps_map(cfg, phis, workers):
    sc = cfg.scenario()
    hover = cfg.hover

    def rows(phi):
        st = sc.at(math.radians(phi))
        return [(phi, float(f), st.skr(PhaseProfile.qps(float(f)), hover))
                for f in focus_grid(st.geom.f_min, st.geom.d2)]

    header = ("phi_i_deg", "f_m", "skr_bits_per_use")
    return Table(header, [r for rs in _pmap(rows, phis, workers) for r in rs])


def exp_optimize_f(cfg, phis, workers):
    sc = cfg.scenario()
    hover = cfg.hover

    def row(phi):
        st = sc.at(math.radians(phi))
        opt = st.optimize_focus(hover, focus_grid(st.geom.f_min, st.geom.d2))
        return (phi, cfg.pe_preset, opt.f_opt, opt.skr_opt, opt.f_opt == st.geom.f_min)

    header = ("phi_i_deg", "pe_preset", "f_opt_m", "skr_opt_bits_per_use", "lps_optimal")
    return Table(header, _pmap(row, phis, workers))


def battery_cases() -> list[tuple[PhaseProfile, str, float]]:
    """The 27 (profile, PE preset, incident angle) cross-check cases."""
    profiles = (PhaseProfile.lps(), PhaseProfile.qps(BATTERY_QPS_FOCUS_M), PhaseProfile.fps())
    return [(p, pe, phi) for p in profiles for pe in BATTERY_PE for phi in BATTERY_PHI_DEG]


def exp_validate_mc(cfg, phis, workers):
    sc = cfg.scenario()
    states: dict[float, LinkState] = {}
    rows = []
    for profile, pe, phi in battery_cases():
        if phi not in states:
            states[phi] = sc.at(math.radians(phi))
        rx = states[phi].widths(profile)
        hover = PE_PRESETS[pe]
        closed = average_gml(rx, hover, cfg.aperture_radius_m)
        mc = mc_average_gml(rx, hover, cfg.aperture_radius_m, cfg.mc_n, cfg.mc_seed, workers)
        case = f"{profile.label}/{pe}/phi{phi:g}"
        rows.append((case, closed, mc.mean, mc.stderr, mc.z_score(closed)))
    return Table(("case", "closed_form", "mc_mean", "mc_stderr", "z_score"), rows)


def exp_dump_nodes(cfg, phis, workers):
    rule = gauss_laguerre(cfg.G)
    rows = [(i, float(x), float(w), float(s))
            for i, (x, w, s) in enumerate(zip(rule.nodes, rule.weights, rule.scaled_weights))]
    return Table(("index", "node", "weight", "scaled_weight"), rows)


@dataclass(frozen=True)
class Experiment:
    run: Callable[[ScenarioConfig, Sequence[float], int | None], Table]
    default_grid: tuple[float, ...]
    x: str
    y: str
    group: str | None


EXPERIMENTS: dict[str, Experiment] = {
    "scintillation": Experiment(exp_scintillation, SCINTILLATION_PHI_GRID_DEG, "d1_m", "sigma_I2", None),
    "beamwidths": Experiment(exp_beamwidths, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "w_rx_x_m", "profile"),
    "gml-fixed": Experiment(exp_gml_fixed, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "gml_db", "profile"),
    "gml-qps-map": Experiment(exp_gml_qps_map, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "f_m", "gml_db"),
    "skr-fixed": Experiment(exp_skr_fixed, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "skr_bits_per_use", "profile"),
    "skr-qps-map": Experiment(exp_skr_qps_map, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "f_m", "skr_bits_per_use"),
    "optimize-f": Experiment(exp_optimize_f, DEFAULT_PHI_GRID_DEG, "phi_i_deg", "f_opt_m", None),
    "validate-mc": Experiment(exp_validate_mc, (), "case", "z_score", None),
    "dump-nodes": Experiment(exp_dump_nodes, (), "node", "scaled_weight", None),
}

_LINE_PLOT = '''\
"""Plot {csv} (generated)."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
series = defaultdict(lambda: ([], []))
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        key = row["{group}"] if "{group}" else "{y}"
        series[key][0].append(float(row["{x}"]))
        series[key][1].append(float(row["{y}"]))
for key, (xs, ys) in series.items():
    plt.plot(xs, ys, marker=".", label=key)
plt.xlabel("{x}")
plt.ylabel("{y}")
plt.legend()
plt.savefig("{stem}.png", dpi=150)
'''

_MAP_PLOT = '''\
"""Plot {csv} as a colour map (generated)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
xs, ys, zs = [], [], []
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        xs.append(float(row["{x}"]))
        ys.append(float(row["{y}"]))
        zs.append(float(row["{z}"]))
sc = plt.scatter(xs, ys, c=zs, s=12, marker="s")
plt.yscale("log")
plt.xlabel("{x}")
plt.ylabel("{y}")
plt.colorbar(sc, label="{z}")
plt.savefig("{stem}.png", dpi=150)
'''

_BAR_PLOT = '''\
"""Plot {csv} (generated)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv}"
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))
plt.bar(range(len(rows)), [float(r["{y}"]) for r in rows])
plt.xticks(range(len(rows)), [r["{x}"] for r in rows], rotation=90, fontsize=6)
plt.ylabel("{y}")
plt.tight_layout()
plt.savefig("{stem}.png", dpi=150)
'''


def plot_script(name: str) -> str:
    exp = EXPERIMENTS[name]
    fields = {"csv": f"{name}.csv", "stem": name, "x": exp.x, "y": exp.y}
    if name.endswith("-map"):
        return _MAP_PLOT.format(z=exp.group, **fields)
    if name == "validate-mc":
        return _BAR_PLOT.format(**fields)
    return _LINE_PLOT.format(group=exp.group or "", **fields)


def run_experiment(
    name: str,
    cfg: ScenarioConfig,
    out_dir: str | Path,
    *,
    phi_grid: Iterable[float] | None = None,
    workers: int | None = None,
) -> list[Path]:
    """Run ``name`` and write its CSV and plot script; return the paths.

    Raises :class:`ValidationFailure` after writing the files if
    ``validate-mc`` finds a case more than three standard errors out.
    """
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    exp = EXPERIMENTS[name]
    phis = tuple(float(p) for p in (exp.default_grid if phi_grid is None else phi_grid))
    table = exp.run(cfg, phis, workers)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    script_path = out / f"{name}_plot.py"
    write_csv(csv_path, table)
    script_path.write_text(plot_script(name), encoding="utf-8")

    if name == "validate-mc":
        bad = [r[0] for r in table.rows if not abs(r[4]) <= Z_LIMIT]
        if bad:
            raise ValidationFailure(f"{len(bad)} case(s) beyond {Z_LIMIT} standard errors: {', '.join(bad)}")
    return [csv_path, script_path]
