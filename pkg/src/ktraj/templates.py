"""Readout templates on a single surface: spokes, conic and planar spiral interleaves.

Units: k in 1/cm, gradients in mT/m, slew in mT/m/ms, time in ms.

Each template is a curve parameterised by its radius (3D radius for spokes
and cones, in-plane radius for spirals).  It is traversed as fast as the
gradient amplitude and slew limits allow, using a forward/backward pass over
an arc-length grid, and then sampled on the gradient raster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InfeasibleDesign, InvalidInputError
from .geometry import (
    DensityParams,
    ExtentModel,
    FovModel,
    cone_fov,
    extent_at,
    fov_at,
    spherical_radial_resolution,
)

GAMMA_BAR_PROTON = 42.5764  # kHz/mT
# (kHz/mT) * (mT/m) = 1/(m ms) = 1e-2 / (cm ms)
K_RATE_SCALE = 1e-2

DESIGN_MARGIN = 0.995
MAX_CORRECTIONS = 20
_SLACK = 1e-9


@dataclass(frozen=True)
class HardwareConfig:
    g_max: float = 39.0
    s_max: float = 145.0
    dt: float = 0.004
    t_read: float = 2.8
    gamma_bar: float = GAMMA_BAR_PROTON

    def __post_init__(self):
        for name in ("g_max", "s_max", "dt", "t_read", "gamma_bar"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"hardware {name} must be positive")

    @property
    def k_rate(self) -> float:
        """k-space speed (1/cm/ms) produced by 1 mT/m."""
        return self.gamma_bar * K_RATE_SCALE

    @property
    def v_max(self) -> float:
        return self.g_max * self.k_rate

    @property
    def a_max(self) -> float:
        return self.s_max * self.k_rate


@dataclass(frozen=True, eq=False)
class Template:
    """One raster-sampled readout.

    ``g_samples[i]`` is the gradient held from sample ``i`` to ``i + 1``, so
    ``k[i + 1] = k[i] + k_rate * dt * g[i]``; the last entry repeats the one
    before it.  The waveform starts from zero gradient.
    """

    kind: str
    surface_label: float
    k_samples: np.ndarray
    g_samples: np.ndarray
    twist_count: int
    hardware: HardwareConfig
    extent: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        violations = template_violations(self.k_samples, self.g_samples, self.hardware)
        if violations:
            raise InfeasibleDesign(f"{self.kind} template violates " + "; ".join(violations))

    @property
    def n_samples(self) -> int:
        return self.k_samples.shape[0]

    @property
    def duration(self) -> float:
        return (self.n_samples - 1) * self.hardware.dt


def slew_of(g: np.ndarray, dt: float) -> np.ndarray:
    """Per-step slew magnitude, including the ramp up from zero."""
    prev = np.vstack([np.zeros((1, 3)), g[:-1]])
    return np.linalg.norm(g - prev, axis=1) / dt


def template_violations(k, g, hw: HardwareConfig) -> list[str]:
    out = []
    gmag = np.linalg.norm(g, axis=1)
    if gmag.max(initial=0.0) > hw.g_max + _SLACK:
        out.append(f"amplitude {gmag.max():.6g} > {hw.g_max}")
    s = slew_of(g, hw.dt)
    if s.max(initial=0.0) > hw.s_max + _SLACK:
        out.append(f"slew {s.max():.6g} > {hw.s_max}")
    recon = k[0] + np.vstack([np.zeros((1, 3)),
                              np.cumsum(g[:-1], axis=0) * hw.k_rate * hw.dt])
    dev = np.abs(recon - k).max(initial=0.0)
    if dev > 1e-6:
        out.append(f"k/g mismatch {dev:.3g}")
    return out


# --- curve geometry -----------------------------------------------------------

@dataclass(frozen=True)
class TwistLaw:
    """Azimuth ``theta(k)`` with rate ``rate * |k/k_end|^(1/alpha - 1)``.

    The normalised radius is clamped at ``floor``.  With ``alpha = 1`` this is
    the uniform law ``theta = rate * k``.
    """

    rate: float
    k_end: float
    alpha: float = 1.0
    floor: float = 0.0

    def _p(self):
        return 1.0 / self.alpha - 1.0

    def theta(self, k):
        k = np.asarray(k, dtype=float)
        if self.rate == 0.0:
            return np.zeros_like(k)
        p, f, ke = self._p(), self.floor, self.k_end
        if p == 0.0:
            return self.rate * k
        kf = f * ke
        lin = self.rate * f ** p * np.minimum(k, kf)
        x = np.maximum(k, kf) / ke
        return lin + self.rate * ke / (p + 1.0) * (x ** (p + 1.0) - f ** (p + 1.0))

    def dtheta(self, k):
        k = np.asarray(k, dtype=float)
        if self.rate == 0.0 or self._p() == 0.0:
            return np.full_like(k, self.rate)
        x = np.maximum(k / self.k_end, self.floor)
        return self.rate * x ** self._p()

    def d2theta(self, k):
        k = np.asarray(k, dtype=float)
        p = self._p()
        if self.rate == 0.0 or p == 0.0:
            return np.zeros_like(k)
        x = k / self.k_end
        out = self.rate * p * np.maximum(x, self.floor) ** (p - 1.0) / self.k_end
        return np.where(x > self.floor, out, 0.0)


@dataclass(frozen=True)
class SurfaceCurve:
    """``C(k) = (a k cos th, a k sin th, b k + z0)`` for ``k`` in ``[0, k_end]``.

    ``a = sin(phi), b = cos(phi)`` for a cone; ``a = 1, b = 0`` for a planar
    spiral at height ``z0``; ``a = 0, b = 1`` for a spoke.
    """

    a: float
    b: float
    k_end: float
    twist: TwistLaw
    z0: float = 0.0

    def point(self, k):
        k = np.asarray(k, dtype=float)
        th = self.twist.theta(k)
        return np.stack([self.a * k * np.cos(th), self.a * k * np.sin(th),
                         self.b * k + self.z0], axis=-1)

    def turns(self) -> float:
        return abs(float(self.twist.theta(self.k_end))) / (2 * np.pi)

    def grid(self, n: int | None = None):
        """Radius grid with arc length and curvature at each node."""
        if n is None:
            n = int(min(max(2048, 96 * self.turns()), 400_000))
        k = np.linspace(0.0, self.k_end, n)
        th, d1, d2 = self.twist.theta(k), self.twist.dtheta(k), self.twist.d2theta(k)
        c, s = np.cos(th), np.sin(th)
        a, b = self.a, self.b
        c1 = np.stack([a * (c - k * d1 * s), a * (s + k * d1 * c), np.full_like(k, b)], axis=-1)
        c2 = np.stack([a * (-2 * d1 * s - k * d2 * s - k * d1 ** 2 * c),
                       a * (2 * d1 * c + k * d2 * c - k * d1 ** 2 * s),
                       np.zeros_like(k)], axis=-1)
        speed = np.linalg.norm(c1, axis=1)
        kappa = np.linalg.norm(np.cross(c1, c2), axis=1) / speed ** 3
        arc = np.concatenate(([0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(k))))
        return k, arc, kappa


def _profile(arc, kappa, hw: HardwareConfig, margin: float, vscale=None):
    vg = hw.v_max * margin
    am = hw.a_max * margin
    with np.errstate(divide="ignore"):
        vcap = np.minimum(vg, np.sqrt(am / kappa))
    if vscale is not None:
        vcap = vcap * vscale
    v = kernels.speed_profile(np.ascontiguousarray(arc), np.ascontiguousarray(kappa),
                              np.ascontiguousarray(vcap), am)
    t = kernels.arrival_times(np.ascontiguousarray(arc), v)
    return v, t


def _arc_at(tq, t, arc, v):
    """Arc length at times ``tq``, constant acceleration within each node interval."""
    j = np.clip(np.searchsorted(t, tq, side="right") - 1, 0, t.size - 2)
    tau = tq - t[j]
    h = t[j + 1] - t[j]
    return np.minimum(arc[j] + v[j] * tau + (v[j + 1] - v[j]) / (2 * h) * tau ** 2, arc[-1])


def traversal_time(curve: SurfaceCurve, hw: HardwareConfig,
                   margin: float = DESIGN_MARGIN) -> float:
    """Shortest rastered duration (ms) of ``curve``; inf if clearly too long."""
    k, arc, kappa = curve.grid()
    if arc[-1] / (hw.v_max * margin) > hw.t_read * 4:
        return math.inf
    _, t = _profile(arc, kappa, hw, margin)
    return math.ceil(t[-1] / hw.dt - 1e-9) * hw.dt


def synthesize_curve(curve: SurfaceCurve, hw: HardwareConfig, kind: str,
                     label: float, twist_count: int) -> Template:
    """Time-parameterise ``curve`` on the raster and check the limits."""
    k, arc, kappa = curve.grid()
    vscale = np.ones_like(arc)
    margin = DESIGN_MARGIN
    for attempt in range(MAX_CORRECTIONS):
        v, t = _profile(arc, kappa, hw, margin, vscale)
        total = t[-1]
        steps = max(1, math.ceil(total / hw.dt - 1e-9))
        duration = steps * hw.dt
        if duration > hw.t_read + 1e-9:
            raise InfeasibleDesign(
                f"{kind} at {label:.4g} needs {duration:.4g} ms > t_read {hw.t_read} ms",
                min_t_read=duration)
        # stretch so the last raster point lands on the end of the curve
        t_r = np.arange(steps + 1) * hw.dt * (total / duration)
        kk = np.interp(_arc_at(t_r, t, arc, v), arc, k)
        kk[-1] = curve.k_end
        pts = curve.point(kk)
        g = np.diff(pts, axis=0) / (hw.k_rate * hw.dt)
        g = np.vstack([g, g[-1:]])
        slew = slew_of(g, hw.dt)
        gmag = np.linalg.norm(g, axis=1)
        bad = (slew > hw.s_max) | (gmag > hw.g_max)
        if not bad.any():
            return Template(kind, float(label), pts, g, int(twist_count), hw,
                            float(curve.k_end), {"corrections": attempt})
        # slow down locally around the offending samples
        ratio = np.minimum(np.sqrt(hw.s_max / np.maximum(slew, 1e-300)),
                           hw.g_max / np.maximum(gmag, 1e-300))
        for i in np.nonzero(bad)[0]:
            lo = np.searchsorted(k, kk[max(i - 2, 0)])
            hi = np.searchsorted(k, kk[min(i + 1, steps)], side="right")
            vscale[lo:hi] = np.minimum(vscale[lo:hi], ratio[i] * 0.99)
        margin *= min(0.99, float(ratio[bad].min()))
    raise InfeasibleDesign(f"{kind} at {label:.4g}: slew limits not met after "
                           f"{MAX_CORRECTIONS} corrections")


# --- per-surface designs ------------------------------------------------------

def spoke_curve(length: float) -> SurfaceCurve:
    return SurfaceCurve(0.0, 1.0, float(length), TwistLaw(0.0, float(length)))


def design_radial_spoke(e: ExtentModel, hw: HardwareConfig, phi: float) -> Template:
    """Straight center-out spoke along +k_z reaching ``K(phi)``."""
    kend = float(extent_at(e, phi))
    return synthesize_curve(spoke_curve(kend), hw, "spoke", phi, 1)


def cone_curve(fm: FovModel, e: ExtentModel, d: DensityParams, phi: float,
               n: int) -> SurfaceCurve:
    if n < 1:
        raise InvalidInputError("interleaf count must be >= 1")
    kend = float(extent_at(e, phi))
    rate = 2 * np.pi * float(cone_fov(fm, phi)) / n
    floor = d.floor(float(fov_at(fm, phi)), kend)
    return SurfaceCurve(float(np.sin(phi)), float(np.cos(phi)), kend,
                        TwistLaw(rate, kend, d.alpha, floor))


def design_cone_template(fm: FovModel, e: ExtentModel, d: DensityParams,
                         hw: HardwareConfig, phi: float, n: int) -> Template:
    """Conic interleaf at polar angle ``phi`` for ``n`` interleaves.

    The twist rate is ``2 pi L_c(phi) / n`` at the edge of k-space and grows
    toward the center as ``|k / K(phi)|^(1/alpha - 1)``.
    """
    if not 0.0 < phi < np.pi:
        raise InvalidInputError("cone polar angle must lie in (0, pi)")
    return synthesize_curve(cone_curve(fm, e, d, phi, n), hw, "cone", phi, n)


def plane_extent(fm: FovModel, e: ExtentModel, z: float,
                 resolution_mode: str = "max") -> float:
    """Spiral radius on the plane ``k_z = z`` for the spherical stack."""
    delta = spherical_radial_resolution(e, 1.0 / (2 * e.k_r), z,
                                        kr_floor=1.0 / fm.l_r, mode=resolution_mode)
    return float(1.0 / (2.0 * delta))


def spiral_curve(fm: FovModel, e: ExtentModel, d: DensityParams, z: float, n: int,
                 resolution_mode: str = "max") -> SurfaceCurve:
    if n < 1:
        raise InvalidInputError("interleaf count must be >= 1")
    kend = plane_extent(fm, e, z, resolution_mode)
    floor = d.floor(fm.l_r, kend)
    return SurfaceCurve(1.0, 0.0, kend,
                        TwistLaw(2 * np.pi * fm.l_r / n, kend, d.alpha_r, floor), z0=float(z))


def design_spiral_template(fm: FovModel, e: ExtentModel, d: DensityParams,
                           hw: HardwareConfig, z: float, n: int,
                           resolution_mode: str = "max") -> Template:
    """Planar spiral interleaf at ``k_z = z`` for ``n`` interleaves."""
    return synthesize_curve(spiral_curve(fm, e, d, z, n, resolution_mode), hw,
                            "spiral", z, n)


def _smallest_feasible(time_of, t_read: float, design, limit: int = 1 << 22):
    spoke_time = time_of(None)
    if spoke_time > t_read + 1e-9:
        raise InfeasibleDesign(f"even an untwisted readout needs {spoke_time:.4g} ms",
                               min_t_read=spoke_time)

    def ok(n):
        return time_of(n) <= t_read + 1e-9

    if ok(1):
        n = 1
    else:
        lo, hi = 1, 2
        while not ok(hi):
            lo, hi = hi, hi * 2
            if hi > limit:
                raise InfeasibleDesign("interleaf search did not converge")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid
        n = hi
    # the rastered design can need marginally more time than the estimate
    for n_try in range(n, n + 8):
        try:
            return n_try, design(n_try)
        except InfeasibleDesign:
            continue
    raise InfeasibleDesign("no feasible interleaf count near the estimate")


def estimate_cone_interleaves(fm: FovModel, e: ExtentModel, d: DensityParams,
                              hw: HardwareConfig, phi: float) -> int:
    """Smallest interleaf count whose conic template fits in ``t_read``."""
    return _cone_count_and_template(fm, e, d, hw, phi)[0]


def _cone_count_and_template(fm, e, d, hw, phi):
    kend = float(extent_at(e, phi))

    def time_of(n):
        curve = spoke_curve(kend) if n is None else cone_curve(fm, e, d, phi, n)
        return traversal_time(curve, hw)

    return _smallest_feasible(time_of, hw.t_read,
                              lambda n: design_cone_template(fm, e, d, hw, phi, n))


def estimate_spiral_interleaves(fm: FovModel, e: ExtentModel, d: DensityParams,
                                hw: HardwareConfig, z: float,
                                resolution_mode: str = "max") -> int:
    """Smallest interleaf count whose spiral template fits in ``t_read``."""
    return _spiral_count_and_template(fm, e, d, hw, z, resolution_mode)[0]


def _spiral_count_and_template(fm, e, d, hw, z, resolution_mode="max"):
    kend = plane_extent(fm, e, z, resolution_mode)

    def time_of(n):
        curve = spoke_curve(kend) if n is None else spiral_curve(fm, e, d, z, n, resolution_mode)
        return traversal_time(curve, hw)

    return _smallest_feasible(
        time_of, hw.t_read,
        lambda n: design_spiral_template(fm, e, d, hw, z, n, resolution_mode))


# --- surface tables -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TemplateSet:
    """Templates on a grid of surfaces (cone angles or plane heights).

    ``counts`` are the integer interleaf counts per surface;
    ``interleaves`` interpolates them linearly for the path equations.
    """

    kind: str
    labels: np.ndarray
    counts: np.ndarray
    templates: list

    @property
    def spacing(self) -> float:
        return float(np.min(np.diff(self.labels))) if self.labels.size > 1 else math.inf

    def interleaves(self):
        from .numerics import SampledFunction
        return SampledFunction(self.labels, self.counts.astype(float))

    def nearest(self, label: float) -> int:
        return int(np.argmin(np.abs(self.labels - label)))


def _surface_table(kind, labels, count_and_template):
    m = labels.size
    counts = np.zeros(m, dtype=int)
    temps = [None] * m
    # both families are mirror-symmetric about the equator
    for j in range((m + 1) // 2):
        counts[j], temps[j] = count_and_template(labels[j])
        mj = m - 1 - j
        if mj != j:
            counts[mj] = counts[j]
            temps[mj] = _mirror_z(temps[j], labels[mj])
    return TemplateSet(kind, labels, counts, temps)


def _mirror_z(t: Template, label: float) -> Template:
    flip = np.array([1.0, 1.0, -1.0])
    return Template(t.kind, float(label), t.k_samples * flip, t.g_samples * flip,
                    t.twist_count, t.hardware, t.extent, dict(t.meta))


def cone_surface_table(fm: FovModel, e: ExtentModel, d: DensityParams,
                       hw: HardwareConfig, n_surfaces: int = 64) -> TemplateSet:
    """Interleaf counts and templates on ``n_surfaces`` cones at cell-centred angles."""
    labels = (np.arange(n_surfaces) + 0.5) * np.pi / n_surfaces
    return _surface_table("cone", labels,
                          lambda phi: _cone_count_and_template(fm, e, d, hw, phi))


def spiral_surface_table(fm: FovModel, e: ExtentModel, d: DensityParams,
                         hw: HardwareConfig, n_surfaces: int = 64,
                         resolution_mode: str = "max") -> TemplateSet:
    """Interleaf counts and templates on ``n_surfaces`` planes across ``[-K_z, K_z]``."""
    labels = (np.arange(n_surfaces) + 0.5) * 2 * e.k_z / n_surfaces - e.k_z
    return _surface_table(
        "spiral", labels,
        lambda z: _spiral_count_and_template(fm, e, d, hw, z, resolution_mode))
