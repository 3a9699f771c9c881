"""Analytic density compensation and a Monte-Carlo Voronoi oracle.

The analytic weight of a sample is the Jacobian determinant of the map from
the trajectory's analytic coordinate to Cartesian k-space, divided by the
path density ``g`` at the readout's position on the path.  The weights are
scaled to approximate each sample's Voronoi volume in (1/cm)^3, so they sum
to roughly the volume of the sampled support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .assembly import KIND_OF_PATH, Trajectory
from .errors import BudgetExceeded, InvalidInputError
from .geometry import extent_at, orthogonal_fov
from .paths import SpiralPath

ORACLE_MAX_SAMPLES = 200_000
ORACLE_BATCH = 1 << 20


@dataclass(frozen=True)
class DcfTable:
    """Per-sample weights, shape ``(readouts, samples)``; padding holds 0.

    ``normalization`` is the constant that multiplies the closed-form
    expression (``k |g.k| / (K^2 L_90)`` for radial, and so on) to give
    ``weights``.
    """

    weights: np.ndarray
    normalization: float

    def flat(self, traj: Trajectory) -> np.ndarray:
        if self.weights.shape != traj.k.shape[:2]:
            raise InvalidInputError("DCF table is not aligned with the trajectory")
        return self.weights[traj.valid_mask()]

    def normalized(self, traj: Trajectory) -> np.ndarray:
        w = self.flat(traj)
        return w / w.sum()


def _centered_gradient(traj: Trajectory) -> np.ndarray:
    g = np.nan_to_num(traj.g)
    prev = np.concatenate([np.zeros_like(g[:, :1]), g[:, :-1]], axis=1)
    return 0.5 * (g + prev)


def _check(traj: Trajectory, path: SpiralPath, kind: str):
    if traj.kind != kind:
        raise InvalidInputError(f"{kind} DCF requested for a {traj.kind} trajectory")
    if KIND_OF_PATH.get(path.kind) != kind:
        raise InvalidInputError(f"path kind {path.kind} does not match {kind}")


def _finish(traj, raw, scale):
    w = np.where(traj.valid_mask(), np.abs(raw) * scale, 0.0)
    return DcfTable(w, float(scale))


def radial_dcf(traj: Trajectory, path: SpiralPath) -> DcfTable:
    _check(traj, path, "radial")
    fm, e = path.params["fov"], path.params["extent"]
    k = np.nan_to_num(traj.k)
    gk = np.einsum("rsi,rsi->rs", _centered_gradient(traj), k)
    kmag = np.linalg.norm(k, axis=2)
    phi = traj.second
    denom = extent_at(e, phi) ** 2 * orthogonal_fov(fm, phi)
    raw = kmag * np.abs(gk) / denom[:, None]
    # 2 pi |det J| dt / g  with  g = 2 pi L_r L90 K^2 sin(phi)
    return _finish(traj, raw, traj.k_rate * traj.dt / fm.l_r)


def cones_dcf(traj: Trajectory, path: SpiralPath) -> DcfTable:
    _check(traj, path, "cones")
    fm, e = path.params["fov"], path.params["extent"]
    k = np.nan_to_num(traj.k)
    gk = np.einsum("rsi,rsi->rs", _centered_gradient(traj), k)
    kmag = np.linalg.norm(k, axis=2)
    phi = traj.second
    denom = extent_at(e, phi) * path.interleaves(phi) * orthogonal_fov(fm, phi)
    raw = kmag * np.abs(gk) * (np.sin(phi) / denom)[:, None]
    return _finish(traj, raw, 2 * np.pi * traj.k_rate * traj.dt)


def stack_dcf(traj: Trajectory, path: SpiralPath) -> DcfTable:
    _check(traj, path, "stack")
    k = np.nan_to_num(traj.k)
    g = _centered_gradient(traj)
    gk = np.einsum("rsi,rsi->rs", g[..., :2], k[..., :2])
    denom = path.g_func(traj.second)  # n(z) L_z(z)
    raw = np.abs(gk) / denom[:, None]
    return _finish(traj, raw, 2 * np.pi * traj.k_rate * traj.dt)


def analytic_dcf(traj: Trajectory, path: SpiralPath) -> DcfTable:
    return {"radial": radial_dcf, "cones": cones_dcf, "stack": stack_dcf}[traj.kind](traj, path)


# --- Monte-Carlo Voronoi oracle ----------------------------------------------

@dataclass(frozen=True)
class Support:
    """Region sampled by a design: ellipsoid or cylinder with semi-axes (k_r, k_z)."""

    shape: str
    k_r: float
    k_z: float

    @property
    def volume(self) -> float:
        if self.shape == "ellipsoid":
            return 4.0 / 3.0 * np.pi * self.k_r ** 2 * self.k_z
        return 2.0 * np.pi * self.k_r ** 2 * self.k_z

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.shape == "ellipsoid":
            v = rng.standard_normal((n, 3))
            v /= np.linalg.norm(v, axis=1, keepdims=True)
            v *= rng.random(n)[:, None] ** (1.0 / 3.0)
            return v * np.array([self.k_r, self.k_r, self.k_z])
        if self.shape == "cylinder":
            r = self.k_r * np.sqrt(rng.random(n))
            th = 2 * np.pi * rng.random(n)
            z = self.k_z * (2 * rng.random(n) - 1)
            return np.column_stack([r * np.cos(th), r * np.sin(th), z])
        raise InvalidInputError(f"unknown support shape {self.shape!r}")

    def contains(self, p: np.ndarray) -> np.ndarray:
        rr = (p[:, 0] ** 2 + p[:, 1] ** 2) / self.k_r ** 2
        zz = (p[:, 2] / self.k_z) ** 2
        if self.shape == "ellipsoid":
            return rr + zz <= 1.0
        return (rr <= 1.0) & (zz <= 1.0)


def support_of(traj: Trajectory) -> Support:
    s = traj.meta.get("support")
    if s is None:
        raise InvalidInputError("trajectory metadata carries no support; pass one explicitly")
    return s if isinstance(s, Support) else Support(*s)


def voronoi_dcf_oracle(traj: Trajectory, mc_points: int, seed: int = 0,
                       support: Support | None = None,
                       batch: int = ORACLE_BATCH) -> DcfTable:
    """Voronoi volumes of the samples estimated by uniform Monte-Carlo points.

    Each uniformly drawn point inside the support is credited to its nearest
    sample; a sample's weight is its share of points times the support
    volume.  Batches use independent streams spawned from ``seed``.
    """
    pts = traj.samples()
    m = pts.shape[0]
    if m > ORACLE_MAX_SAMPLES:
        raise BudgetExceeded(f"{m} samples exceed the oracle budget of {ORACLE_MAX_SAMPLES}; "
                             "design at a coarser resolution or raster")
    if mc_points < 100 * m:
        raise InvalidInputError(f"mc_points must be at least 100x the sample count ({100 * m})")
    support = support or support_of(traj)
    tree = cKDTree(pts)
    counts = np.zeros(m, dtype=np.int64)
    n_batches = -(-mc_points // batch)
    streams = np.random.SeedSequence(seed).spawn(n_batches)
    left = mc_points
    for ss in streams:
        n = min(batch, left)
        left -= n
        q = support.draw(np.random.default_rng(ss), n)
        _, idx = tree.query(q, workers=-1)
        counts += np.bincount(idx, minlength=m)
    w_flat = counts * (support.volume / mc_points)
    w = np.zeros(traj.lengths.shape + (traj.n_samples,))
    w[traj.valid_mask()] = w_flat
    return DcfTable(w, support.volume / mc_points)


def relative_rms(a: np.ndarray, b: np.ndarray) -> float:
    """RMS of ``(a - b) / b`` after normalising both to unit sum."""
    a = a / a.sum()
    b = b / b.sum()
    return float(np.sqrt(np.mean(((a - b) / b) ** 2)))
