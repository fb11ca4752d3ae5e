"""Smooth dielectric functions for diffuse-interface electrostatics.

All evaluators are vectorized: ``value`` takes points of shape ``(..., 3)``
and returns ``(...)``; ``gradient`` returns ``(..., 3)``.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def _points(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 3:
        raise ValueError(f"points must have a trailing axis of length 3, got {r.shape}")
    return r


class Dielectric(ABC):
    """A strictly positive dielectric coefficient with a gradient.

    Subclasses must implement ``value``. ``gradient`` falls back to central
    differences with step ``fd_step``; override it when an analytic form exists.
    """

    fd_step = 1e-6

    @abstractmethod
    def value(self, r) -> np.ndarray: ...

    def gradient(self, r) -> np.ndarray:
        r = _points(r)
        d = self.fd_step
        grad = np.empty(r.shape)
        for a in range(3):
            e = np.zeros(3)
            e[a] = d
            grad[..., a] = (self.value(r + e) - self.value(r - e)) / (2 * d)
        return grad

    def radial_value(self, rho) -> np.ndarray:
        """Value along the +x axis at distance ``rho`` (meaningful for radial models)."""
        rho = np.asarray(rho, dtype=float)
        pts = np.zeros(rho.shape + (3,))
        pts[..., 0] = rho
        return self.value(pts)


@dataclass(frozen=True)
class ConstantDielectric(Dielectric):
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError("dielectric constant must be positive")

    def value(self, r):
        r = _points(r)
        return np.full(r.shape[:-1], float(self.eps))

    def gradient(self, r):
        return np.zeros(_points(r).shape)


@dataclass(frozen=True)
class TanhSphericalDielectric(Dielectric):
    """Spherical diffuse interface built from a clamped tanh level set.

    Inside ``r_i`` the level set is ``s_i``, outside ``r_e`` it is ``s_e``, and in
    the band it follows ``(s_e - s_i) * (tanh(k*(rho - 1/2)) + 1)/2 + s_i`` with
    ``rho = (|r| - r_i)/(r_e - r_i)``. The dielectric blends the two bulk values,
    ``eps = s*eps_i + (1 - s)*eps_e``.

    With ``normalized=True`` the tanh profile is rescaled so the band meets the
    plateaus continuously; the default keeps the raw profile, which jumps by
    ``(1 - tanh(k/2))/2`` at both radii.
    """

    r_i: float = 2.0
    r_e: float = 5.0
    k: float = 6.0
    s_i: float = 1.0
    s_e: float = 0.0
    eps_i: float = 1.0
    eps_e: float = 80.0
    normalized: bool = False

    def __post_init__(self):
        if not 0 < self.r_i < self.r_e:
            raise ConfigError(f"need 0 < r_i < r_e, got r_i={self.r_i}, r_e={self.r_e}")
        if not self.k > 0:
            raise ConfigError("steepness k must be positive")
        if not (self.eps_i > 0 and self.eps_e > 0):
            raise ConfigError("dielectric constants must be positive")
        # blending must stay positive for every level-set value in the plateau range
        for s in (self.s_i, self.s_e):
            if not s * self.eps_i + (1 - s) * self.eps_e > 0:
                raise ConfigError("level-set plateaus give a non-positive dielectric")

    @property
    def width(self) -> float:
        return self.r_e - self.r_i

    def _profile(self, rho):
        """Band shape in [0, 1] as a function of the scaled radius and its derivative."""
        half = 0.5 * self.k
        t = np.tanh(self.k * (rho - 0.5))
        dt = self.k * (1.0 - t * t)
        if self.normalized:
            norm = np.tanh(half)
            return (t + norm) / (2 * norm), dt / (2 * norm)
        return (t + 1.0) / 2.0, dt / 2.0

    def level_set_radial(self, rad) -> np.ndarray:
        rad = np.asarray(rad, dtype=float)
        rho = (rad - self.r_i) / self.width
        shape, _ = self._profile(rho)
        band = (self.s_e - self.s_i) * shape + self.s_i
        return np.where(rad <= self.r_i, self.s_i, np.where(rad >= self.r_e, self.s_e, band))

    def level_set(self, r) -> np.ndarray:
        return self.level_set_radial(np.linalg.norm(_points(r), axis=-1))

    def epsilon_radial(self, rad) -> np.ndarray:
        s = self.level_set_radial(rad)
        return s * self.eps_i + (1.0 - s) * self.eps_e

    def epsilon_radial_derivative(self, rad) -> np.ndarray:
        """d(eps)/d|r|; exactly zero outside the open band."""
        rad = np.asarray(rad, dtype=float)
        inband = (rad > self.r_i) & (rad < self.r_e)
        rho = (rad - self.r_i) / self.width
        _, dshape = self._profile(rho)
        ds = (self.s_e - self.s_i) * dshape / self.width
        return np.where(inband, (self.eps_i - self.eps_e) * ds, 0.0)

    def band_primitive(self, rad) -> np.ndarray:
        """Integral of the band derivative of eps from 0 to ``rad``.

        Continuous in ``rad`` even when the raw profile jumps at the band edges,
        since those jumps are not part of the band derivative.
        """
        rad = np.clip(np.asarray(rad, dtype=float), self.r_i, self.r_e)
        shape, _ = self._profile((rad - self.r_i) / self.width)
        shape0, _ = self._profile(0.0)
        return (self.eps_i - self.eps_e) * (self.s_e - self.s_i) * (shape - shape0)

    def value(self, r):
        return self.epsilon_radial(np.linalg.norm(_points(r), axis=-1))

    def gradient(self, r):
        r = _points(r)
        rad = np.linalg.norm(r, axis=-1)
        deps = self.epsilon_radial_derivative(rad)
        safe = np.where(rad > 0, rad, 1.0)
        return (deps / safe)[..., None] * r

    def radial_value(self, rho):
        return self.epsilon_radial(rho)


def level_set(m: TanhSphericalDielectric, r) -> np.ndarray:
    return m.level_set(r)


def epsilon(m: Dielectric, r) -> np.ndarray:
    return m.value(r)


def epsilon_gradient(m: Dielectric, r) -> np.ndarray:
    return m.gradient(r)
