"""Run the centred-charge benchmark: regularized and trilinear solves, norms, tables.

The benchmark is a unit charge at the centre of the cube [-10, 10]^3 inside a
spherical diffuse interface (r_i = 2, r_e = 5, k = 6, eps 1 -> 80) with the
exterior Coulomb potential as Dirichlet data.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .charges import ChargeSet, greens_on_grid, load_charges
from .dielectric import TanhSphericalDielectric
from .errors import ConfigError, GridMismatchError
from .grid import Grid, ScalarField, make_grid
from .operator import assemble_regularized, assemble_trilinear, build_operator
from .radial import RadialProblem, RadialProfile, solve_radial
from .solver import SolveReport, SolverConfig, solve

logger = logging.getLogger(__name__)

DOMAIN_LOWER = (-10.0, -10.0, -10.0)
DOMAIN_EXTENT = 20.0
CSV_HEADER = ["N", "h", "pair", "norm", "value", "observed_order"]


@dataclass
class ExperimentConfig:
    grid_sizes: Sequence[int] = (50, 100, 200, 400)
    method: str = "both"
    r_i: float = 2.0
    r_e: float = 5.0
    k: float = 6.0
    s_i: float = 1.0
    s_e: float = 0.0
    eps_i: float = 1.0
    eps_e: float = 80.0
    # continuous band by default; False reproduces the raw tanh with its edge jumps
    continuous_interface: bool = True
    charges_path: Optional[str] = None
    q: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: Optional[str] = None
    oracle_nodes: int = 200001

    def __post_init__(self):
        if self.method not in ("regularized", "trilinear", "both"):
            raise ConfigError(f"unknown method {self.method!r}")
        if not self.grid_sizes or any(n < 3 for n in self.grid_sizes):
            raise ConfigError("grid sizes must be integers >= 3")
        self.dielectric()  # validates the interface parameters

    def dielectric(self) -> TanhSphericalDielectric:
        return TanhSphericalDielectric(
            self.r_i, self.r_e, self.k, self.s_i, self.s_e, self.eps_i, self.eps_e,
            normalized=self.continuous_interface,
        )

    def charges(self) -> ChargeSet:
        if self.charges_path:
            return load_charges(self.charges_path)
        return ChargeSet.single(self.q)

    def grid(self, n: int) -> Grid:
        return make_grid(DOMAIN_LOWER, DOMAIN_EXTENT, n)


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    h: float
    norm_name: str
    pair: str
    value: float
    observed_order: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"norm value must be finite and non-negative, got {self.value}")


def run_regularized(cfg: ExperimentConfig, n: Optional[int] = None, operator=None):
    """Reaction-field solve; returns ``(u_rf, u_total, report)`` with ``u_total = u_rf + G``."""
    n = cfg.grid_sizes[0] if n is None else n
    grid = cfg.grid(n)
    d, charges = cfg.dielectric(), cfg.charges()
    system = assemble_regularized(grid, d, charges, operator=operator)
    u_rf, report = solve(system, cfg.solver)
    G = greens_on_grid(charges, d.eps_i, grid)
    return u_rf, ScalarField(grid, u_rf.values + G.values), report


def run_trilinear(cfg: ExperimentConfig, n: Optional[int] = None, operator=None):
    """Full-potential solve with trilinear charges; returns ``(u, u_tl, report)``, ``u_tl = u - G``."""
    n = cfg.grid_sizes[0] if n is None else n
    grid = cfg.grid(n)
    d, charges = cfg.dielectric(), cfg.charges()
    system = assemble_trilinear(grid, d, charges, operator=operator)
    u, report = solve(system, cfg.solver)
    G = greens_on_grid(charges, d.eps_i, grid)
    return u, ScalarField(grid, u.values - G.values), report


def _exclusion_mask(grid: Grid, charges: Optional[ChargeSet], radius: float) -> np.ndarray:
    keep = np.ones(grid.shape, dtype=bool)
    if radius > 0 and charges is not None:
        for c in charges:
            keep &= grid.radius(c.position) >= radius
    return keep


def compute_norms(a: ScalarField, b: ScalarField, exclusion_radius: float = 0.0,
                  charges: Optional[ChargeSet] = None):
    """``(L2, Linf)`` of ``a - b``.

    ``L2 = sqrt(h**3 * sum (a-b)**2)`` over interior nodes; ``Linf`` over all
    included nodes. Nodes closer than ``exclusion_radius`` to a charge are skipped.
    """
    if a.grid != b.grid:
        raise GridMismatchError("cannot compare fields on different grids")
    grid = a.grid
    diff = np.abs(a.values - b.values)
    keep = _exclusion_mask(grid, charges, exclusion_radius)
    linf = float(diff[keep].max()) if keep.any() else 0.0
    inner = keep & grid.interior_mask()
    l2 = math.sqrt(grid.spacing**3 * float(np.sum(diff[inner] ** 2)))
    return l2, linf


def rms_norm(a: ScalarField, b: ScalarField) -> float:
    """Root-mean-square of ``a - b`` over all N**3 nodes (mesh-independent scale)."""
    if a.grid != b.grid:
        raise GridMismatchError("cannot compare fields on different grids")
    d = a.values - b.values
    return math.sqrt(float(np.mean(d * d)))


def oracle_profile(cfg: ExperimentConfig) -> RadialProfile:
    """Radial reference covering every node of the cube (out to its half-diagonal)."""
    charges = cfg.charges()
    if not is_centred_single(charges):
        raise ConfigError("the radial oracle needs exactly one charge at the origin")
    r_max = math.sqrt(3.0) * DOMAIN_EXTENT / 2
    return solve_radial(RadialProblem(cfg.dielectric(), charges[0].magnitude, r_max, cfg.oracle_nodes))


def oracle_field(profile: RadialProfile, grid: Grid) -> ScalarField:
    return ScalarField(grid, profile(grid.radius()))


def observed_orders(rows):
    """Attach log-ratio orders between successive grid sizes for each (pair, norm) series."""
    out, last = [], {}
    for row in rows:
        key = (row.pair, row.norm_name)
        order = None
        if key in last:
            prev = last[key]
            if prev.value > 0 and row.value > 0:
                order = math.log(prev.value / row.value) / math.log(prev.h / row.h)
        last[key] = row
        out.append(replace(row, observed_order=order))
    return out


def _rows(n, h, pair, a, b):
    l2, linf = compute_norms(a, b)
    return [
        ComparisonRow(n, h, "L2", pair, l2),
        ComparisonRow(n, h, "RMS", pair, rms_norm(a, b)),
        ComparisonRow(n, h, "Linf", pair, linf),
    ]


@dataclass
class GridResult:
    n: int
    rows: list
    u_rf: Optional[ScalarField] = None
    u_tl: Optional[ScalarField] = None
    reports: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.reports.values())


def study_grid(cfg: ExperimentConfig, n: int, profile: Optional[RadialProfile] = None) -> GridResult:
    """Solve with the configured method(s) on one grid and tabulate the differences."""
    grid = cfg.grid(n)
    op = build_operator(grid, cfg.dielectric())
    res = GridResult(n, [])
    if cfg.method in ("regularized", "both"):
        res.u_rf, _, res.reports["regularized"] = run_regularized(cfg, n, operator=op)
    if cfg.method in ("trilinear", "both"):
        _, res.u_tl, res.reports["trilinear"] = run_trilinear(cfg, n, operator=op)
    for name, rep in res.reports.items():
        logger.info("N=%d %s: %d iterations, residual %.2e, %.1fs",
                    n, name, rep.iterations, rep.final_relative_residual, rep.wall_time)
    if res.u_rf is not None and res.u_tl is not None:
        res.rows += _rows(n, grid.spacing, "RF_vs_TL", res.u_rf, res.u_tl)
    if res.u_rf is not None and profile is not None:
        res.rows += _rows(n, grid.spacing, "RF_vs_oracle", res.u_rf, oracle_field(profile, grid))
    return res


def is_centred_single(charges: ChargeSet) -> bool:
    return len(charges) == 1 and not np.any(charges.positions[0])


def convergence_study(cfg: ExperimentConfig, keep_fields: bool = False):
    """Table of RF-vs-TL and RF-vs-oracle differences for every grid size.

    Returns the rows and, if ``keep_fields``, a dict ``N -> GridResult``.
    Oracle rows are produced only for a single charge at the origin.
    """
    if cfg.method != "both":
        raise ConfigError("a convergence study needs method='both'")
    profile = oracle_profile(cfg) if is_centred_single(cfg.charges()) else None
    rows, results = [], {}
    for n in cfg.grid_sizes:
        res = study_grid(cfg, n, profile)
        rows += res.rows
        if keep_fields:
            results[n] = res
    rows = observed_orders(rows)
    if cfg.out_dir:
        write_table(rows, Path(cfg.out_dir) / "convergence.csv")
    return (rows, results) if keep_fields else rows


def write_table(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            order = "" if r.observed_order is None else f"{r.observed_order:.6g}"
            w.writerow([r.n, f"{r.h:.17g}", r.pair, r.norm_name, f"{r.value:.17g}", order])
    return path


def format_table(rows) -> str:
    lines = [f"{'N':>5} {'h':>8} {'pair':>13} {'norm':>5} {'value':>11} {'order':>7}"]
    for r in rows:
        order = "" if r.observed_order is None else f"{r.observed_order:7.2f}"
        lines.append(f"{r.n:5d} {r.h:8.4f} {r.pair:>13} {r.norm_name:>5} {r.value:11.3e} {order:>7}")
    return "\n".join(lines)


def emit_slice(f: ScalarField, path, z: float = 0.0) -> Path:
    """Write the node plane nearest to ``z`` as ``x,y,value`` rows."""
    grid = f.grid
    zs = grid.axis(2)
    kz = int(np.argmin(np.abs(zs - z)))
    xs, ys = grid.axis(0), grid.axis(1)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# z={zs[kz]:.17g}\n")
        w = csv.writer(fh)
        w.writerow(["x", "y", "value"])
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                w.writerow([f"{x:.17g}", f"{y:.17g}", f"{f.values[i, j, kz]:.17g}"])
    return path


def read_slice(path):
    """Inverse of :func:`emit_slice`: returns ``(z, array of rows [x, y, value])``."""
    with open(path) as fh:
        z = float(fh.readline().split("=", 1)[1])
        data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
    return z, data
