"""Elliptical field-of-view and k-space extent models.

Lengths are in cm and spatial frequencies in 1/cm.  Polar angles are
measured from the +k_z axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class FovModel:
    l_r: float
    l_z: float

    def __post_init__(self):
        if not (self.l_r > 0 and self.l_z > 0):
            raise InvalidInputError("FOV lengths must be positive")

    def scaled(self, s: float) -> "FovModel":
        return FovModel(self.l_r * s, self.l_z * s)


@dataclass(frozen=True)
class ExtentModel:
    k_r: float
    k_z: float

    def __post_init__(self):
        if not (self.k_r > 0 and self.k_z > 0):
            raise InvalidInputError("k-space extents must be positive")

    @classmethod
    def from_resolution(cls, dx: float, dz: float | None = None) -> "ExtentModel":
        """Extent ``1 / (2 * resolution)`` for voxel sizes in cm."""
        dz = dx if dz is None else dz
        return cls(1.0 / (2.0 * dx), 1.0 / (2.0 * dz))

    @property
    def k_max(self) -> float:
        return max(self.k_r, self.k_z)


@dataclass(frozen=True)
class DensityParams:
    """Variable-density exponents; 1 means uniform density.

    ``k_floor_frac`` clamps the normalised radius in the density laws.  When
    ``None`` the clamp is half a Nyquist cell, ``1 / (2 L K)``, worked out by
    the caller from the relevant FOV and extent.
    """

    alpha: float = 1.0
    alpha_r: float = 1.0
    alpha_z: float = 1.0
    k_floor_frac: float | None = None

    def __post_init__(self):
        for name in ("alpha", "alpha_r", "alpha_z"):
            if not getattr(self, name) >= 1.0:
                raise InvalidInputError(f"{name} must be >= 1")
        f = self.k_floor_frac
        if f is not None and not 0.0 < f < 1.0:
            raise InvalidInputError("k_floor_frac must lie in (0, 1)")

    def floor(self, fov: float, extent: float) -> float:
        if self.k_floor_frac is not None:
            return self.k_floor_frac
        return min(0.5, 1.0 / (2.0 * fov * extent))


def _ellipse(a, b, phi):
    c, s = np.cos(phi), np.sin(phi)
    return a * b / np.sqrt((a * c) ** 2 + (b * s) ** 2)


def fov_at(m: FovModel, phi):
    """FOV along polar angle ``phi``: ``L_z`` on the axis, ``L_r`` in-plane."""
    return _ellipse(m.l_r, m.l_z, phi)


def orthogonal_fov(m: FovModel, phi):
    # fov_at is pi-periodic, so phi + pi/2 needs no explicit wrapping
    return fov_at(m, np.asarray(phi) + np.pi / 2)


def extent_at(e: ExtentModel, phi):
    return _ellipse(e.k_r, e.k_z, phi)


def cone_fov(m: FovModel, phi):
    """FOV seen along the surface of the cone at polar angle ``phi``."""
    return np.hypot(m.l_z * np.cos(phi), m.l_r * np.sin(phi))


def vd_profile(ratio, alpha: float, floor: float):
    """``|ratio| ** (1/alpha - 1)`` with ``|ratio|`` clamped below at ``floor``."""
    r = np.maximum(np.abs(ratio), floor)
    return r ** (1.0 / alpha - 1.0)


def vd_fov_radial(m: FovModel, e: ExtentModel, d: DensityParams, k, phi):
    """Radially modulated FOV ``L(phi) |k / K(phi)|^(1/alpha - 1)``."""
    lphi = fov_at(m, phi)
    kphi = extent_at(e, phi)
    floor = d.floor(np.min(lphi), np.min(kphi))
    return lphi * vd_profile(np.asarray(k) / kphi, d.alpha, floor)


def vd_fov_z(m: FovModel, d: DensityParams, z, k_max_z: float):
    """z-modulated FOV ``L_z |z / k_max_z|^(1/alpha_z - 1)``."""
    floor = d.floor(m.l_z, k_max_z)
    return m.l_z * vd_profile(np.asarray(z) / k_max_z, d.alpha_z, floor)


def spherical_polar_angle(e: ExtentModel, k_z):
    """Polar angle of the ellipsoid point at height ``k_z``."""
    kz = np.asarray(k_z, dtype=float)
    den = np.sqrt((e.k_z * e.k_r) ** 2 + (e.k_z * kz) ** 2 - (e.k_r * kz) ** 2)
    return np.arccos(np.clip(e.k_z * kz / den, -1.0, 1.0))


def spherical_kr_max(e: ExtentModel, k_z, floor: float = 0.0):
    """In-plane radius of the extent ellipsoid at height ``k_z``, floored."""
    phi = spherical_polar_angle(e, k_z)
    kr = np.abs(extent_at(e, phi) * np.sin(phi))
    return np.maximum(kr, floor)


def spherical_radial_resolution(e: ExtentModel, delta_min: float, k_z,
                                kr_floor: float = 0.0, mode: str = "max"):
    """Radial resolution (cm) of the spiral plane at height ``k_z``.

    With ``mode="max"`` the plane's resolution coarsens as the ellipsoid
    narrows toward the poles.  ``mode="min"`` applies the literal minimum,
    which always returns ``delta_min`` on an ellipsoid.  ``kr_floor``
    (1/cm) keeps the polar planes at a finite extent.
    """
    kz = np.asarray(k_z, dtype=float)
    if np.any(np.abs(kz) > e.k_z * (1 + 1e-12)):
        raise DomainError(f"|k_z| exceeds the axial extent {e.k_z}")
    kr = spherical_kr_max(e, np.clip(kz, -e.k_z, e.k_z), kr_floor)
    with np.errstate(divide="ignore"):
        nat = 1.0 / (2.0 * kr)
    if mode == "max":
        return np.maximum(nat, delta_min)
    if mode == "min":
        return np.minimum(nat, delta_min)
    raise InvalidInputError(f"unknown resolution mode {mode!r}")
