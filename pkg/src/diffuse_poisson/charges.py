"""Point charges, their Coulomb (Green's function) potential, and source terms.

Units follow the Gaussian convention of the model problem: the source of the
original equation is ``4*pi*sum(q_j * delta(r - r_j))`` while the Green's
function carries no ``4*pi``, ``G(r) = sum(q_j / (eps_i * |r - r_j|))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .dielectric import Dielectric, TanhSphericalDielectric
from .errors import ConfigError, SingularEvaluationError
from .grid import Grid, ScalarField

SINGULAR_DISTANCE = 1e-14


@dataclass(frozen=True)
class PointCharge:
    position: tuple[float, float, float]
    magnitude: float

    def __post_init__(self):
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3 or not all(np.isfinite(pos)):
            raise ConfigError(f"bad charge position {self.position!r}")
        if not np.isfinite(self.magnitude):
            raise ConfigError(f"bad charge magnitude {self.magnitude!r}")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "magnitude", float(self.magnitude))


class ChargeSet(Sequence):
    """Non-empty, immutable collection of point charges."""

    def __init__(self, charges: Iterable[PointCharge]):
        self._charges = tuple(charges)
        if not self._charges:
            raise ConfigError("a charge set needs at least one charge")

    @classmethod
    def single(cls, q: float = 1.0, position=(0.0, 0.0, 0.0)) -> "ChargeSet":
        return cls([PointCharge(tuple(position), q)])

    def __getitem__(self, i):
        return self._charges[i]

    def __len__(self):
        return len(self._charges)

    def __repr__(self):
        return f"ChargeSet({list(self._charges)!r})"

    @property
    def positions(self) -> np.ndarray:
        return np.array([c.position for c in self._charges], dtype=float)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.array([c.magnitude for c in self._charges], dtype=float)

    @property
    def total(self) -> float:
        return float(self.magnitudes.sum())

    def check_inside(self, dielectric: Dielectric):
        """Charges must sit in the constant inner medium (strictly inside r_i)."""
        if isinstance(dielectric, TanhSphericalDielectric):
            rad = np.linalg.norm(self.positions, axis=1)
            bad = rad >= dielectric.r_i
            if np.any(bad):
                raise ConfigError(
                    f"charges at radius {rad[bad]} are not strictly inside r_i={dielectric.r_i}"
                )

    def check_off_nodes(self, grid: Grid, rtol: float = 1e-10):
        """Reject charges that coincide with a grid node (distance < rtol*h)."""
        h = grid.spacing
        lower = np.asarray(grid.lower)
        for c in self._charges:
            t = (np.asarray(c.position) - lower) / h
            nearest = np.clip(np.rint(t), 0, grid.n - 1)
            if np.linalg.norm((t - nearest) * h) < rtol * h:
                raise ConfigError(f"charge at {c.position} coincides with a grid node")


def load_charges(path) -> ChargeSet:
    """Read ``x y z q`` lines; ``#`` comments and blank lines are skipped."""
    charges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ConfigError(f"{path}:{lineno}: expected 'x y z q', got {line!r}")
        try:
            x, y, z, q = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        charges.append(PointCharge((x, y, z), q))
    return ChargeSet(charges)


def save_charges(charges: ChargeSet, path) -> Path:
    path = Path(path)
    lines = ["# x y z q"]
    lines += [" ".join(f"{v:.17g}" for v in (*c.position, c.magnitude)) for c in charges]
    path.write_text("\n".join(lines) + "\n")
    return path


def _offsets(charges: ChargeSet, r):
    r = np.asarray(r, dtype=float)
    for c in charges:
        d = r - np.asarray(c.position)
        dist = np.linalg.norm(d, axis=-1)
        if np.any(dist < SINGULAR_DISTANCE):
            raise SingularEvaluationError(f"evaluation point coincides with charge at {c.position}")
        yield c.magnitude, d, dist


def coulomb_potential(charges: ChargeSet, eps: float, r) -> np.ndarray:
    """``sum(q_j / (eps * |r - r_j|))`` at points ``r`` of shape ``(..., 3)``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape[:-1])
    for q, _, dist in _offsets(charges, r):
        out += q / (eps * dist)
    return out


def greens_potential(charges: ChargeSet, eps_i: float, r) -> np.ndarray:
    return coulomb_potential(charges, eps_i, r)


def greens_gradient(charges: ChargeSet, eps_i: float, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros(r.shape)
    for q, d, dist in _offsets(charges, r):
        out -= (q / (eps_i * dist**3))[..., None] * d
    return out


def boundary_potential(charges: ChargeSet, eps_e: float, r) -> np.ndarray:
    """Dirichlet data: Coulomb potential of the charges in the exterior medium."""
    return coulomb_potential(charges, eps_e, r)


def greens_on_grid(charges: ChargeSet, eps_i: float, grid: Grid) -> ScalarField:
    return ScalarField(grid, greens_potential(charges, eps_i, grid.points()))


def regularized_source(charges: ChargeSet, dielectric: Dielectric, grid: Grid) -> ScalarField:
    """Smooth source ``grad(eps) . grad(G)`` sampled at the grid nodes.

    Only nodes where the dielectric gradient can be nonzero are evaluated; for
    the spherical model that is the open band ``r_i < |r| < r_e``.
    """
    charges.check_inside(dielectric)
    eps_i = _inner_eps(dielectric)
    values = np.zeros(grid.shape)
    pts = grid.points()
    if isinstance(dielectric, TanhSphericalDielectric):
        rad = grid.radius()
        mask = (rad > dielectric.r_i) & (rad < dielectric.r_e)
    else:
        mask = np.any(dielectric.gradient(pts) != 0.0, axis=-1)
    sel = pts[mask]
    if sel.size:
        values[mask] = np.einsum(
            "pa,pa->p", dielectric.gradient(sel), greens_gradient(charges, eps_i, sel)
        )
    return ScalarField(grid, values)


def _inner_eps(dielectric: Dielectric) -> float:
    if isinstance(dielectric, TanhSphericalDielectric):
        return dielectric.eps_i
    eps = getattr(dielectric, "eps", None)
    if eps is None:
        eps = getattr(dielectric, "eps_i", None)
    if eps is None:
        raise ConfigError("dielectric does not expose an inner dielectric constant eps_i")
    return float(eps)


def trilinear_source(charges: ChargeSet, grid: Grid) -> ScalarField:
    """Distribute ``4*pi*q_j`` to the 8 vertices of each charge's cell, as a density."""
    h = grid.spacing
    lower = np.asarray(grid.lower)
    values = np.zeros(grid.shape)
    for c in charges:
        t = (np.asarray(c.position) - lower) / h
        if np.any(t < 0) or np.any(t > grid.n - 1):
            raise ConfigError(f"charge at {c.position} lies outside the grid")
        for ijk, w in trilinear_weights(c.position, grid):
            values[ijk] += 4.0 * np.pi * c.magnitude * w / h**3
    return ScalarField(grid, values)


def trilinear_weights(position, grid: Grid):
    """Vertex indices and weights used by :func:`trilinear_source` for one point."""
    h = grid.spacing
    t = (np.asarray(position, dtype=float) - np.asarray(grid.lower)) / h
    base = np.minimum(np.floor(t).astype(int), grid.n - 2)
    frac = t - base
    out = []
    for corner in np.ndindex(2, 2, 2):
        w = float(np.prod(np.where(np.array(corner) == 1, frac, 1.0 - frac)))
        out.append((tuple(int(v) for v in base + corner), w))
    return out
