"""Desk-scale verification: point-spread functions, sphere uniformity, density profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .assembly import Trajectory
from .dcf import DcfTable
from .errors import BudgetExceeded, InvalidInputError

PSF_OP_BUDGET = 1e10
_CHUNK = 512


@dataclass(frozen=True, eq=False)
class PsfImage:
    """PSF on a centred voxel grid; voxel ``n // 2`` along each axis is x = 0."""

    grid_shape: tuple
    voxel_size: tuple
    values: np.ndarray
    dc: float

    @property
    def center(self) -> tuple:
        return tuple(n // 2 for n in self.grid_shape)

    def axis_coords(self, axis: int) -> np.ndarray:
        n = self.grid_shape[axis]
        return (np.arange(n) - n // 2) * self.voxel_size[axis]

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def profile(self, axis: int) -> np.ndarray:
        """Magnitude along ``axis`` through the centre."""
        idx = list(self.center)
        idx[axis] = slice(None)
        return np.abs(self.values[tuple(idx)])

    def plane(self, name: str) -> np.ndarray:
        cx, cy, cz = self.center
        if name == "axial":
            return self.values[:, :, cz]
        if name == "coronal":
            return self.values[:, cy, :]
        if name == "sagittal":
            return self.values[cx, :, :]
        raise InvalidInputError(f"unknown plane {name!r}")


def _as_shape(grid_shape):
    shape = (int(grid_shape),) * 3 if np.isscalar(grid_shape) else tuple(int(n) for n in grid_shape)
    if len(shape) != 3 or min(shape) < 1:
        raise InvalidInputError("grid_shape needs three positive integers")
    return shape


def compute_psf(traj: Trajectory, dcf: DcfTable, grid_shape, fov_render) -> PsfImage:
    """Direct Fourier sum ``sum_i w_i exp(2 pi i k_i . x)``, normalised to 1 at x = 0.

    The exponential separates per axis, so each chunk of samples becomes one
    complex matrix product ``(nx, C) @ (C, ny * nz)``.  Chunks are reduced in
    a fixed order, so results are reproducible on one platform.
    """
    shape = _as_shape(grid_shape)
    fov = np.broadcast_to(np.asarray(fov_render, dtype=float), (3,))
    if np.any(fov <= 0):
        raise InvalidInputError("render FOV must be positive")
    k = traj.samples()
    w = dcf.flat(traj)
    if w.shape[0] != k.shape[0]:
        raise InvalidInputError("DCF table is not aligned with the trajectory")
    ops = float(k.shape[0]) * np.prod(shape, dtype=float)
    if ops > PSF_OP_BUDGET:
        factor = (ops / PSF_OP_BUDGET) ** (1 / 3)
        raise BudgetExceeded(f"PSF needs {ops:.3g} ops > {PSF_OP_BUDGET:.0e}; reduce the grid "
                             f"by about {factor:.2f}x per axis or use fewer samples")
    vox = fov / np.asarray(shape)
    x = [(np.arange(n) - n // 2) * v for n, v in zip(shape, vox)]
    nx, ny, nz = shape
    acc = np.zeros((nx, ny * nz), dtype=complex)
    for s in range(0, k.shape[0], _CHUNK):
        kc, wc = k[s:s + _CHUNK], w[s:s + _CHUNK]
        ex = np.exp(2j * np.pi * np.outer(kc[:, 0], x[0])) * wc[:, None]
        ey = np.exp(2j * np.pi * np.outer(kc[:, 1], x[1]))
        ez = np.exp(2j * np.pi * np.outer(kc[:, 2], x[2]))
        acc += ex.T @ (ey[:, :, None] * ez[:, None, :]).reshape(kc.shape[0], ny * nz)
    dc = float(w.sum())
    if dc == 0.0:
        raise InvalidInputError("DCF weights sum to zero")
    return PsfImage(shape, tuple(vox), acc.reshape(shape) / dc, dc)


def fwhm(profile: np.ndarray, spacing: float, center: int | None = None) -> float:
    """Full width at half maximum around ``center`` by linear interpolation."""
    p = np.abs(np.asarray(profile, dtype=float))
    c = p.size // 2 if center is None else center
    half = 0.5 * p[c]

    def crossing(step):
        i = c
        while 0 <= i + step < p.size:
            j = i + step
            if p[j] <= half:
                return abs(i - c) + (p[i] - half) / (p[i] - p[j])
            i = j
        raise InvalidInputError("profile never falls to half maximum")

    return (crossing(1) + crossing(-1)) * spacing


def alias_onset(image: PsfImage, axis: int, start: float) -> float:
    """Distance along ``axis`` where the first aliasing lobe rises.

    Works on the slice-wise maximum magnitude (aliasing of radial-like
    patterns lies off the axis), symmetrised about the centre.  Beyond
    ``start`` the background level is the median and the lobe level the
    maximum; the onset is the first half-way crossing, linearly interpolated.
    """
    m = image.magnitude()
    other = tuple(a for a in range(3) if a != axis)
    prof = m.max(axis=other)
    c = prof.size // 2
    n = min(c, prof.size - 1 - c)
    side = 0.5 * (prof[c:c + n + 1] + prof[c - n:c + 1][::-1])
    r = np.arange(n + 1) * image.voxel_size[axis]
    idx = np.nonzero(r >= start)[0]
    if idx.size < 3:
        raise InvalidInputError("render FOV too small to search for aliasing")
    level = 0.5 * (np.median(side[idx]) + side[idx].max())
    for i in idx:
        if side[i] >= level:
            if i == idx[0]:
                return float(r[i])
            f = (level - side[i - 1]) / (side[i] - side[i - 1])
            return float(r[i - 1] + f * (r[i] - r[i - 1]))
    raise InvalidInputError("no aliasing lobe found")


# --- sphere uniformity -------------------------------------------------------

@dataclass(frozen=True)
class UniformityStats:
    mean: float
    cv: float
    min: float
    max: float
    mean_caps_excluded: float
    cv_caps_excluded: float
    n_points: int
    n_excluded: int


def _random_on_sphere(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_uniformity(points, mc_points: int = 2_000_000, seed: int = 0,
                      cap_deg: float = 5.0, batch: int = 1 << 20) -> UniformityStats:
    """Monte-Carlo spherical Voronoi areas of unit vectors.

    Uniform points on the sphere are credited to their nearest input point
    (chordal distance ranks the same as geodesic).  Statistics are reported
    for all points and with polar caps of ``cap_deg`` degrees excluded.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 3 or p.shape[0] < 4:
        raise InvalidInputError("need at least 4 three-dimensional points")
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    tree = cKDTree(p)
    counts = np.zeros(p.shape[0], dtype=np.int64)
    left = int(mc_points)
    for ss in np.random.SeedSequence(seed).spawn(-(-left // batch)):
        n = min(batch, left)
        left -= n
        _, idx = tree.query(_random_on_sphere(np.random.default_rng(ss), n), workers=-1)
        counts += np.bincount(idx, minlength=p.shape[0])
    area = counts * (4 * np.pi / mc_points)
    polar = np.degrees(np.arccos(np.clip(p[:, 2], -1, 1)))
    keep = (polar >= cap_deg) & (polar <= 180.0 - cap_deg)
    if keep.sum() < 2:
        raise InvalidInputError("polar-cap exclusion leaves fewer than two points")
    a = area[keep]
    return UniformityStats(float(area.mean()), float(area.std() / area.mean()),
                           float(area.min()), float(area.max()),
                           float(a.mean()), float(a.std() / a.mean()),
                           int(p.shape[0]), int((~keep).sum()))


# --- density profiles ---------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    axis: str
    edges: np.ndarray
    counts: np.ndarray
    weighted: np.ndarray | None
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def density_profile(traj: Trajectory, dcf: DcfTable | None = None, axis: str = "radius",
                    bins=32) -> Histogram:
    """Sample counts per bin of radius, k_z or polar angle.

    ``density`` is the count per unit k-space volume of each bin's shell
    (radius), slab (z, per unit height) or per unit solid angle (polar).
    """
    k = traj.samples()
    if axis == "radius":
        v = np.linalg.norm(k, axis=1)
        rng = (0.0, v.max())
    elif axis == "z":
        v = k[:, 2]
        rng = (v.min(), v.max())
    elif axis == "polar":
        r = np.linalg.norm(k, axis=1)
        ok = r > 0
        k, v = k[ok], np.arccos(np.clip(k[ok, 2] / r[ok], -1, 1))
        rng = (0.0, np.pi)
    else:
        raise InvalidInputError(f"unknown axis {axis!r}")
    counts, edges = np.histogram(v, bins=bins, range=rng)
    weighted = None
    if dcf is not None:
        w = dcf.flat(traj)
        if axis == "polar":
            w = w[np.linalg.norm(traj.samples(), axis=1) > 0]
        weighted, _ = np.histogram(v, bins=edges, weights=w)
    if axis == "radius":
        measure = 4.0 / 3.0 * np.pi * np.diff(edges ** 3)
    elif axis == "polar":
        measure = 2 * np.pi * np.diff(-np.cos(edges))
    else:
        measure = np.diff(edges)
    return Histogram(axis, edges, counts, weighted, counts / measure)
