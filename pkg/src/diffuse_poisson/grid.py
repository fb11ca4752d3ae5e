"""Uniform cubic grids and node-based scalar fields.

Field values are stored as ``(N, N, N)`` arrays indexed ``[i, j, k]`` (x, y, z).
The flat, x-fastest ordering ``i + N*j + N**2*k`` used for file output is the
Fortran-order ravel of that array.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridMismatchError


@dataclass(frozen=True)
class Grid:
    lower: tuple[float, float, float]
    n: int
    spacing: float

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"need at least 3 nodes per axis, got {self.n}")
        if not self.spacing > 0:
            raise ConfigError(f"spacing must be positive, got {self.spacing}")

    @property
    def extent(self) -> float:
        return self.spacing * (self.n - 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def size(self) -> int:
        return self.n**3

    def axis(self, a: int) -> np.ndarray:
        """Node coordinates along axis ``a``."""
        return self.lower[a] + self.spacing * np.arange(self.n)

    def _check(self, i, j, k):
        for idx in (i, j, k):
            if not 0 <= idx < self.n:
                raise IndexError(f"node index {(i, j, k)} outside [0, {self.n - 1}]")

    def node(self, i: int, j: int, k: int) -> np.ndarray:
        self._check(i, j, k)
        return np.asarray(self.lower, dtype=float) + self.spacing * np.array([i, j, k], dtype=float)

    def is_boundary(self, i: int, j: int, k: int) -> bool:
        self._check(i, j, k)
        last = self.n - 1
        return any(idx in (0, last) for idx in (i, j, k))

    def linear_index(self, i, j, k):
        return i + self.n * j + self.n * self.n * k

    def unravel(self, idx):
        k, rem = divmod(idx, self.n * self.n)
        j, i = divmod(rem, self.n)
        return i, j, k

    def points(self) -> np.ndarray:
        """All node positions as an ``(N, N, N, 3)`` array."""
        x, y, z = np.meshgrid(self.axis(0), self.axis(1), self.axis(2), indexing="ij")
        return np.stack([x, y, z], axis=-1)

    def radius(self, center=(0.0, 0.0, 0.0)) -> np.ndarray:
        """Distance of every node from ``center``, shape ``(N, N, N)``."""
        dx = (self.axis(0) - center[0])[:, None, None]
        dy = (self.axis(1) - center[1])[None, :, None]
        dz = (self.axis(2) - center[2])[None, None, :]
        return np.sqrt(dx * dx + dy * dy + dz * dz)

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[1:-1, 1:-1, 1:-1] = True
        return mask


def make_grid(lower, extent: float, n: int) -> Grid:
    """Cubic grid with ``n`` nodes per axis spanning ``[lower, lower + extent]``."""
    if n < 3:
        raise ConfigError(f"need at least 3 nodes per axis, got {n}")
    if not extent > 0:
        raise ConfigError(f"extent must be positive, got {extent}")
    lo = tuple(float(v) for v in lower)
    if len(lo) != 3:
        raise ConfigError("lower corner must have 3 components")
    return Grid(lo, int(n), extent / (n - 1))


def benchmark_grid(n: int) -> Grid:
    """The benchmark domain [-10, 10]^3 with ``n`` nodes per axis."""
    return make_grid((-10.0, -10.0, -10.0), 20.0, n)


@dataclass
class ScalarField:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise GridMismatchError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_flat(cls, grid: Grid, flat) -> "ScalarField":
        flat = np.asarray(flat, dtype=float)
        if flat.size != grid.size:
            raise GridMismatchError(f"expected {grid.size} values, got {flat.size}")
        return cls(grid, flat.reshape(grid.shape, order="F"))

    @property
    def flat(self) -> np.ndarray:
        """Values in x-fastest linear order."""
        return self.values.ravel(order="F")

    def __getitem__(self, ijk):
        return self.values[ijk]

    def same_grid(self, other: "ScalarField"):
        if other.grid != self.grid:
            raise GridMismatchError("fields are defined on different grids")


def write_field(f: ScalarField, path) -> Path:
    """Full-field ASCII export: header ``N h xmin ymin zmin`` then one value per line."""
    path = Path(path)
    g = f.grid
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.spacing:.17g} {g.lower[0]:.17g} {g.lower[1]:.17g} {g.lower[2]:.17g}\n")
        np.savetxt(fh, f.flat, fmt="%.17g")
    return path


def read_field(path) -> ScalarField:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().split()
        data = np.loadtxt(fh, ndmin=1)
    n, h = int(header[0]), float(header[1])
    lower = tuple(float(v) for v in header[2:5])
    grid = Grid(lower, n, h)
    return ScalarField.from_flat(grid, data)
