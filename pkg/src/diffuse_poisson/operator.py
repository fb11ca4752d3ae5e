"""Matrix-free flux-form discretization of ``-div(eps grad u)`` on a uniform grid.

The 7-point stencil at an interior node ``p`` is

    (A u)(p) = sum over faces f of eps_f * (u(p) - u(nb_f)) / h**2

with ``eps_f`` the dielectric evaluated analytically at the face midpoint. Each
face coefficient is stored once (``eps_x[i]`` sits between nodes ``i`` and
``i+1``), so neighbouring rows share it and the operator is symmetric.
Dirichlet nodes are eliminated: their contribution is moved to the right-hand
side and the unknowns are the ``(N-2)**3`` interior values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charges import (
    ChargeSet,
    boundary_potential,
    greens_potential,
    regularized_source,
    trilinear_source,
)
from .dielectric import Dielectric, TanhSphericalDielectric
from .errors import ConfigError, GridMismatchError
from .grid import Grid, ScalarField

_INT = (slice(1, -1),) * 3


def _eval_on_lattice(d: Dielectric, xs, ys, zs) -> np.ndarray:
    """Dielectric on the tensor lattice ``xs x ys x zs``, one z-slab at a time."""
    out = np.empty((len(xs), len(ys), len(zs)))
    if isinstance(d, TanhSphericalDielectric):
        r2 = xs[:, None] ** 2 + ys[None, :] ** 2
        for c, z in enumerate(zs):
            out[:, :, c] = d.epsilon_radial(np.sqrt(r2 + z * z))
        return out
    x, y = np.meshgrid(xs, ys, indexing="ij")
    for c, z in enumerate(zs):
        pts = np.stack([x, y, np.full_like(x, z)], axis=-1)
        out[:, :, c] = d.value(pts)
    return out


try:
    import numba
except ImportError:  # pragma: no cover - numpy path below is complete
    numba = None


def _stencil_numpy(ex, ey, ez, diag, w, out):
    """Interior ``sum eps_f * (w_p - w_nb)``, unscaled by ``1/h**2``."""
    np.multiply(diag, w[_INT], out=out)
    out -= ex[1:, 1:-1, 1:-1] * w[2:, 1:-1, 1:-1]
    out -= ex[:-1, 1:-1, 1:-1] * w[:-2, 1:-1, 1:-1]
    out -= ey[1:-1, 1:, 1:-1] * w[1:-1, 2:, 1:-1]
    out -= ey[1:-1, :-1, 1:-1] * w[1:-1, :-2, 1:-1]
    out -= ez[1:-1, 1:-1, 1:] * w[1:-1, 1:-1, 2:]
    out -= ez[1:-1, 1:-1, :-1] * w[1:-1, 1:-1, :-2]
    return out


if numba is not None:

    @numba.njit(cache=True, fastmath=False)
    def _stencil_jit(ex, ey, ez, diag, w, out):
        m = out.shape[0]
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    I, J, K = i + 1, j + 1, k + 1
                    out[i, j, k] = (
                        diag[i, j, k] * w[I, J, K]
                        - ex[I, J, K] * w[I + 1, J, K]
                        - ex[I - 1, J, K] * w[I - 1, J, K]
                        - ey[I, J, K] * w[I, J + 1, K]
                        - ey[I, J - 1, K] * w[I, J - 1, K]
                        - ez[I, J, K] * w[I, J, K + 1]
                        - ez[I, J, K - 1] * w[I, J, K - 1]
                    )
        return out

    _stencil_kernel = _stencil_jit
else:  # pragma: no cover
    _stencil_kernel = _stencil_numpy


class VariableCoefficientOperator:
    def __init__(self, grid: Grid, eps_x, eps_y, eps_z):
        n = grid.n
        if eps_x.shape != (n - 1, n, n) or eps_y.shape != (n, n - 1, n) or eps_z.shape != (n, n, n - 1):
            raise GridMismatchError("face coefficient arrays do not match the grid")
        self.grid = grid
        self.eps_x = np.ascontiguousarray(eps_x, dtype=float)
        self.eps_y = np.ascontiguousarray(eps_y, dtype=float)
        self.eps_z = np.ascontiguousarray(eps_z, dtype=float)
        self.inv_h2 = 1.0 / grid.spacing**2
        ex, ey, ez = self.eps_x, self.eps_y, self.eps_z
        self._diag = (
            ex[1:, 1:-1, 1:-1] + ex[:-1, 1:-1, 1:-1]
            + ey[1:-1, 1:, 1:-1] + ey[1:-1, :-1, 1:-1]
            + ez[1:-1, 1:-1, 1:] + ez[1:-1, 1:-1, :-1]
        )
        self._work = np.zeros(grid.shape)
        self.kernel = _stencil_kernel

    @property
    def interior_shape(self):
        m = self.grid.n - 2
        return (m, m, m)

    def diagonal(self) -> np.ndarray:
        """Diagonal of the interior matrix (Jacobi preconditioner)."""
        return self._diag * self.inv_h2

    def _stencil(self, w: np.ndarray) -> np.ndarray:
        out = np.empty(self.interior_shape)
        self.kernel(self.eps_x, self.eps_y, self.eps_z, self._diag, w, out)
        out *= self.inv_h2
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply to interior unknowns with homogeneous Dirichlet data."""
        self._work[_INT] = x
        return self._stencil(self._work)

    def apply(self, u: ScalarField) -> ScalarField:
        """Stencil on interior nodes; boundary rows act as the identity."""
        if u.grid != self.grid:
            raise GridMismatchError("field and operator live on different grids")
        out = u.values.copy()
        out[_INT] = self._stencil(u.values)
        return ScalarField(self.grid, out)

    def fold_boundary(self, boundary_values: ScalarField) -> np.ndarray:
        """Right-hand-side contribution ``sum eps_f * g_nb / h**2`` of the Dirichlet data."""
        if boundary_values.grid != self.grid:
            raise GridMismatchError("boundary data and operator live on different grids")
        w = boundary_values.values.copy()
        w[_INT] = 0.0
        return -self._stencil(w)


def build_operator(grid: Grid, dielectric: Dielectric) -> VariableCoefficientOperator:
    h = grid.spacing
    xs, ys, zs = grid.axis(0), grid.axis(1), grid.axis(2)
    eps_x = _eval_on_lattice(dielectric, xs[:-1] + h / 2, ys, zs)
    eps_y = _eval_on_lattice(dielectric, xs, ys[:-1] + h / 2, zs)
    eps_z = _eval_on_lattice(dielectric, xs, ys, zs[:-1] + h / 2)
    return VariableCoefficientOperator(grid, eps_x, eps_y, eps_z)


@dataclass
class LinearSystem:
    operator: VariableCoefficientOperator
    rhs: ScalarField
    boundary_values: ScalarField
    source: ScalarField

    @property
    def grid(self) -> Grid:
        return self.operator.grid

    def rhs_interior(self) -> np.ndarray:
        return self.rhs.values[_INT]


def _dielectric_constants(dielectric, eps_i, eps_e):
    eps_i = getattr(dielectric, "eps_i", None) if eps_i is None else eps_i
    eps_e = getattr(dielectric, "eps_e", None) if eps_e is None else eps_e
    if eps_i is None or eps_e is None:
        raise ConfigError("inner/outer dielectric constants are required for this dielectric")
    return float(eps_i), float(eps_e)


def boundary_field(grid: Grid, fn) -> ScalarField:
    """Field holding ``fn(points)`` on boundary nodes and zero inside."""
    values = np.zeros(grid.shape)
    mask = ~grid.interior_mask()
    values[mask] = fn(grid.points()[mask])
    return ScalarField(grid, values)


def _system(op, source: ScalarField, bvals: ScalarField) -> LinearSystem:
    rhs = np.zeros(op.grid.shape)
    rhs[_INT] = source.values[_INT] + op.fold_boundary(bvals)
    return LinearSystem(op, ScalarField(op.grid, rhs), bvals, source)


def assemble_regularized(grid: Grid, dielectric: Dielectric, charges: ChargeSet,
                         eps_i=None, eps_e=None, operator=None) -> LinearSystem:
    """System for the reaction-field potential: smooth source, data ``g - G``."""
    eps_i, eps_e = _dielectric_constants(dielectric, eps_i, eps_e)
    charges.check_inside(dielectric)
    charges.check_off_nodes(grid)
    op = build_operator(grid, dielectric) if operator is None else operator
    source = regularized_source(charges, dielectric, grid)
    bvals = boundary_field(
        grid, lambda p: boundary_potential(charges, eps_e, p) - greens_potential(charges, eps_i, p)
    )
    return _system(op, source, bvals)


def assemble_trilinear(grid: Grid, dielectric: Dielectric, charges: ChargeSet,
                       eps_i=None, eps_e=None, operator=None) -> LinearSystem:
    """System for the full potential with trilinearly spread point charges."""
    _, eps_e = _dielectric_constants(dielectric, eps_i, eps_e)
    charges.check_off_nodes(grid)
    op = build_operator(grid, dielectric) if operator is None else operator
    source = trilinear_source(charges, grid)
    bvals = boundary_field(grid, lambda p: boundary_potential(charges, eps_e, p))
    return _system(op, source, bvals)


def assemble(operator: VariableCoefficientOperator, source: ScalarField,
             boundary_values: ScalarField) -> LinearSystem:
    """Generic system from a source field and Dirichlet data (e.g. manufactured solutions)."""
    return _system(operator, source, boundary_values)
