"""Preconditioned conjugate gradients for the folded (SPD) interior system."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .grid import ScalarField
from .operator import LinearSystem, _INT, numba

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    rel_tolerance: float = 1e-10
    max_iterations: Optional[int] = None  # None -> 10 * N
    preconditioner: str = "jacobi"
    fused: bool = True  # numba-fused iteration when available

    def __post_init__(self):
        if not 0 < self.rel_tolerance < 1:
            raise ConfigError("rel_tolerance must lie in (0, 1)")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.preconditioner not in ("none", "jacobi"):
            raise ConfigError(f"unknown preconditioner {self.preconditioner!r}")


@dataclass
class SolveReport:
    iterations: int
    final_relative_residual: float
    residual_history: list = field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = True


def _dot(a, b) -> float:
    # fixed-order reduction: einsum on contiguous data avoids threaded BLAS
    return float(np.einsum("i,i->", a.ravel(), b.ravel()))


if numba is not None:

    @numba.njit(cache=True)
    def _apply_dot(ex, ey, ez, diag, inv_h2, p, q):
        """``q = A p`` on the interior of the zero-padded ``p``; returns ``<p, q>``."""
        m = q.shape[0]
        acc = 0.0
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    I, J, K = i + 1, j + 1, k + 1
                    v = inv_h2 * (
                        diag[i, j, k] * p[I, J, K]
                        - ex[I, J, K] * p[I + 1, J, K]
                        - ex[I - 1, J, K] * p[I - 1, J, K]
                        - ey[I, J, K] * p[I, J + 1, K]
                        - ey[I, J - 1, K] * p[I, J - 1, K]
                        - ez[I, J, K] * p[I, J, K + 1]
                        - ez[I, J, K - 1] * p[I, J, K - 1]
                    )
                    q[i, j, k] = v
                    acc += p[I, J, K] * v
        return acc

    @numba.njit(cache=True)
    def _update(alpha, p, q, x, r, z, inv_diag):
        """x += alpha p; r -= alpha q; z = M^-1 r; returns ``(<r, z>, <r, r>)``."""
        m = q.shape[0]
        rz = 0.0
        rr = 0.0
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    x[i, j, k] += alpha * p[i + 1, j + 1, k + 1]
                    rv = r[i, j, k] - alpha * q[i, j, k]
                    r[i, j, k] = rv
                    zv = inv_diag[i, j, k] * rv
                    z[i, j, k] = zv
                    rz += rv * zv
                    rr += rv * rv
        return rz, rr

    @numba.njit(cache=True)
    def _direction(beta, z, p):
        m = z.shape[0]
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    p[i + 1, j + 1, k + 1] = z[i, j, k] + beta * p[i + 1, j + 1, k + 1]


def _cg_fused(op, b, bnorm, inv_diag, x, tol, max_it):
    """Same iteration as the numpy loop in :func:`solve`, in three fused passes."""
    r = b - op.matvec(x)
    z = inv_diag * r
    p = np.zeros(op.grid.shape)
    p[_INT] = z
    q = np.empty(op.interior_shape)
    rz = _dot(r, z)
    history = [np.sqrt(_dot(r, r)) / bnorm]
    it = 0
    while it < max_it:
        if history[-1] <= tol:
            r = b - op.matvec(x)
            history[-1] = np.sqrt(_dot(r, r)) / bnorm
            if history[-1] <= tol:
                return x, history, it
            z = inv_diag * r
            p[_INT] = z
            rz = _dot(r, z)
        pq = _apply_dot(op.eps_x, op.eps_y, op.eps_z, op._diag, op.inv_h2, p, q)
        alpha = rz / pq
        rz_new, rr = _update(alpha, p, q, x, r, z, inv_diag)
        it += 1
        history.append(np.sqrt(rr) / bnorm)
        _direction(rz_new / rz, z, p)
        rz = rz_new
    return x, history, it


def relative_residual(system: LinearSystem, x_interior: np.ndarray) -> float:
    b = system.rhs_interior()
    bnorm = np.sqrt(_dot(b, b))
    if bnorm == 0.0:
        r = system.operator.matvec(x_interior)
        return float(np.sqrt(_dot(r, r)))
    r = b - system.operator.matvec(x_interior)
    return float(np.sqrt(_dot(r, r)) / bnorm)


def _cg_numpy(op, b, bnorm, inv_diag, x, tol, max_it):
    r = b - op.matvec(x)
    z = inv_diag * r
    p = z.copy()
    rz = _dot(r, z)
    history = [np.sqrt(_dot(r, r)) / bnorm]
    it = 0
    while it < max_it:
        if history[-1] <= tol:
            # confirm against the true residual before stopping
            r = b - op.matvec(x)
            history[-1] = np.sqrt(_dot(r, r)) / bnorm
            if history[-1] <= tol:
                return x, history, it
            z = inv_diag * r
            p = z.copy()
            rz = _dot(r, z)
        q = op.matvec(p)
        alpha = rz / _dot(p, q)
        x += alpha * p
        r -= alpha * q
        it += 1
        history.append(np.sqrt(_dot(r, r)) / bnorm)
        z = inv_diag * r
        rz_new = _dot(r, z)
        p *= rz_new / rz
        p += z
        rz = rz_new
    return x, history, it


def solve(system: LinearSystem, cfg: SolverConfig = SolverConfig(), x0=None):
    """Solve ``A x = b`` on interior nodes; returns the full field and a report.

    Boundary nodes of the returned field carry ``system.boundary_values``.
    Non-convergence is reported through ``report.converged``, not raised.
    """
    t0 = time.perf_counter()
    grid = system.grid
    op = system.operator
    max_it = cfg.max_iterations if cfg.max_iterations is not None else 10 * grid.n
    b = system.rhs_interior()
    bnorm = np.sqrt(_dot(b, b))

    def finish(x, history, it, converged):
        full = system.boundary_values.values.copy()
        full[_INT] = x
        report = SolveReport(it, history[-1], history, time.perf_counter() - t0, converged)
        if not converged:
            logger.warning("CG stopped after %d iterations at residual %.3e", it, history[-1])
        return ScalarField(grid, full), report

    if bnorm == 0.0:
        return finish(np.zeros(op.interior_shape), [0.0], 0, True)

    if cfg.preconditioner == "jacobi":
        inv_diag = 1.0 / op.diagonal()
    else:
        inv_diag = np.ones(op.interior_shape)
    x = np.zeros(op.interior_shape) if x0 is None else np.array(x0, dtype=float)

    loop = _cg_fused if (cfg.fused and numba is not None) else _cg_numpy
    x, history, it = loop(op, b, bnorm, inv_diag, x, cfg.rel_tolerance, max_it)
    if history[-1] <= cfg.rel_tolerance:
        return finish(x, history, it, True)

    r = b - op.matvec(x)
    history[-1] = np.sqrt(_dot(r, r)) / bnorm
    return finish(x, history, it, history[-1] <= cfg.rel_tolerance)
