"""1D reference solution for a single charge at the centre of a radial dielectric.

With one charge at the origin and radial boundary data, the reaction-field
equation reduces to

    -(1/r^2) (r^2 eps(r) u')' = eps'(r) G'(r),   G'(r) = -q / (eps_i r^2)

on ``[0, r_max]`` with ``u'(0) = 0`` and ``u(r_max) = q (1/eps_e - 1/eps_i) / r_max``.

The discretization is a node-centred finite-volume scheme on a uniform radial
grid: cells ``[r_{m-1/2}, r_{m+1/2}]`` (half a cell at the origin, which also
encodes the symmetric extension ``u(-dr) = u(dr)``), face fluxes
``r^2 eps (u_{m+1} - u_m) / dr`` with eps at the face, and cell sources
integrated exactly. The resulting tridiagonal system is eliminated directly:
forward elimination yields the face fluxes by accumulation from the origin,
back substitution recovers ``u`` from the Dirichlet end inward.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .dielectric import TanhSphericalDielectric
from .errors import ConfigError


@dataclass(frozen=True)
class RadialProblem:
    dielectric: TanhSphericalDielectric
    q: float = 1.0
    r_max: float = 10.0
    m: int = 200001

    def __post_init__(self):
        if self.r_max < self.dielectric.r_e:
            raise ConfigError(f"r_max={self.r_max} must be at least r_e={self.dielectric.r_e}")
        if self.m < 1001:
            raise ConfigError("radial grid needs at least 1001 nodes")

    @property
    def boundary_value(self) -> float:
        d = self.dielectric
        return self.q * (1.0 / d.eps_e - 1.0 / d.eps_i) / self.r_max


@dataclass
class RadialProfile:
    """Tabulated reaction-field potential ``u(r)`` with cubic-spline sampling."""

    r: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self._spline = CubicSpline(self.r, self.u)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def __call__(self, rad) -> np.ndarray:
        rad = np.asarray(rad, dtype=float)
        if np.any(rad < 0) or np.any(rad > self.r_max * (1 + 1e-12)):
            raise ValueError(f"radius outside [0, {self.r_max}]")
        return self._spline(np.clip(rad, 0.0, self.r_max))

    def derivative(self, rad) -> np.ndarray:
        return self._spline(np.asarray(rad, dtype=float), 1)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "u_rf"])
            for r, u in zip(self.r, self.u):
                w.writerow([f"{r:.17g}", f"{u:.17g}"])
        return path


def radial_system(p: RadialProblem):
    """Tridiagonal coefficients ``(lower, diag, upper, rhs)`` of the radial scheme.

    Row ``m`` reads ``lower[m] u[m-1] + diag[m] u[m] + upper[m] u[m+1] = rhs[m]``.
    Kept separate from :func:`solve_radial` so the discrete equations can be
    checked independently of the elimination.
    """
    d = p.dielectric
    m = p.m
    dr = p.r_max / (m - 1)
    r = dr * np.arange(m)
    faces = np.append(r[:-1] + dr / 2, r[-1])
    a = faces[:-1] ** 2 * d.epsilon_radial(faces[:-1]) / dr  # face conductances
    prim = d.band_primitive(faces)
    # integral of r^2 eps' G' over each cell = -(q/eps_i) * (P(r+) - P(r-))
    src = -p.q / d.eps_i * np.diff(np.concatenate([[d.band_primitive(0.0)], prim]))

    lower = np.zeros(m)
    diag = np.zeros(m)
    upper = np.zeros(m)
    rhs = np.zeros(m)
    diag[:-1] += a
    upper[:-1] = -a
    diag[1:-1] += a[:-1]
    lower[1:-1] = -a[:-1]
    rhs[:-1] = src[:-1]
    diag[-1] = 1.0
    rhs[-1] = p.boundary_value
    return r, lower, diag, upper, rhs


def solve_radial(p: RadialProblem) -> RadialProfile:
    r, lower, diag, upper, rhs = radial_system(p)
    a = -upper[:-1]
    # forward elimination: outward flux through face m+1/2 is the accumulated source
    flux = np.cumsum(rhs[:-1])
    # back substitution: u_m = u_{m+1} + flux_{m+1/2} / a_{m+1/2}
    steps = flux / a
    u = np.empty_like(r)
    u[-1] = rhs[-1]
    u[:-1] = rhs[-1] + np.cumsum(steps[::-1])[::-1]
    return RadialProfile(r, u)


def sample_radial(profile: RadialProfile, r) -> np.ndarray:
    """Profile value at the distance of each point ``r`` (shape ``(..., 3)``) from the origin."""
    return profile(np.linalg.norm(np.asarray(r, dtype=float), axis=-1))
