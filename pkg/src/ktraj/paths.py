"""Spiral paths on the ellipsoid and cylinder that place the readouts.

A path is a pair ``(theta_p(u), second(u))`` on ``u in (0, 1)`` where the
second coordinate is the polar angle (radial and cones) or the plane height
(stack of spirals).  The second coordinate solves ``d second/du = N / g``;
the azimuth advances so that neighbouring turns and neighbouring readouts
sit one Nyquist cell apart.  Sampling ``u`` at ``1/N`` gives the readouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError, SearchFailure
from .geometry import DensityParams, ExtentModel, FovModel, extent_at, orthogonal_fov, vd_fov_z
from .numerics import DEFAULT_GRID, CdfSolution, SampledFunction, solve_cdf_ode

KINDS = ("ellipsoid-radial", "ellipsoid-cones", "cylinder-stack")


@dataclass(frozen=True, eq=False)
class SpiralPath:
    kind: str
    n_real: float
    solution: CdfSolution
    theta_p: SampledFunction
    theta_of_second: SampledFunction
    g_denominator: SampledFunction
    g_func: Callable = field(repr=False)
    theta_rate: Callable = field(repr=False)
    interleaves: SampledFunction | None = None
    params: dict = field(default_factory=dict)

    @property
    def second_coord(self) -> SampledFunction:
        return self.solution.f_of_u

    def second(self, u):
        return self.solution.f_of_u(u)

    def theta(self, u):
        return self.theta_of_second(self.second(u))

    def rates(self, u):
        """``(theta_dot, second_dot)`` from the path's differential equations."""
        f = self.second(u)
        return self.theta_rate(f), self.n_real / self.g_func(f)


@dataclass(frozen=True)
class DiscretizedPath:
    kind: str
    count: int
    u: np.ndarray
    theta: np.ndarray
    second: np.ndarray

    @property
    def angles(self) -> np.ndarray:
        return np.column_stack([self.theta, self.second])


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _build(kind, g_func, dtheta_dsecond, theta_rate, lo, hi, grid, **extra) -> SpiralPath:
    x = np.linspace(lo, hi, grid)
    g = SampledFunction(x, g_func(x))
    sol = solve_cdf_ode(g, lo, hi)
    rate = dtheta_dsecond(x)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(x))))
    theta_of_second = SampledFunction(x, cum)
    u = sol.f_of_u.abscissae
    theta_p = SampledFunction(u, theta_of_second(sol.f_of_u.ordinates))
    return SpiralPath(kind, sol.n_total, sol, theta_p, theta_of_second, g,
                      g_func, lambda f: theta_rate(f, sol.n_total), **extra)


def design_radial_path(fm: FovModel, e: ExtentModel, grid: int = DEFAULT_GRID) -> SpiralPath:
    """Path on the ellipsoid whose samples are the tips of 3D radial spokes."""

    def g_func(phi):
        return (2 * np.pi * fm.l_r * orthogonal_fov(fm, phi)
                * extent_at(e, phi) ** 2 * np.sin(phi))

    def dtheta(phi):
        return 2 * np.pi * orthogonal_fov(fm, phi) * extent_at(e, phi)

    def theta_rate(phi, n):
        return n / (fm.l_r * extent_at(e, phi) * np.sin(phi))

    return _build("ellipsoid-radial", g_func, dtheta, theta_rate, 0.0, np.pi, grid,
                  params={"fov": fm, "extent": e})


def design_cones_path(fm: FovModel, e: ExtentModel, n_of_phi: SampledFunction,
                      grid: int = DEFAULT_GRID) -> SpiralPath:
    """Path on the ellipsoid placing conic interleaves, ``n_of_phi`` per cone."""
    if np.any(n_of_phi.ordinates <= 0):
        raise InvalidInputError("interleaf counts must be positive")

    def g_func(phi):
        return extent_at(e, phi) * n_of_phi(phi) * orthogonal_fov(fm, phi)

    def dtheta(phi):
        return 2 * np.pi * extent_at(e, phi) * orthogonal_fov(fm, phi)

    def theta_rate(phi, n):
        return 2 * np.pi * n / n_of_phi(phi)

    return _build("ellipsoid-cones", g_func, dtheta, theta_rate, 0.0, np.pi, grid,
                  interleaves=n_of_phi, params={"fov": fm, "extent": e})


def design_stack_path(fm: FovModel, e: ExtentModel, d: DensityParams,
                      n_of_z: SampledFunction, grid: int = DEFAULT_GRID) -> SpiralPath:
    """Path on the unit cylinder placing the spiral planes of a stack."""
    if np.any(n_of_z.ordinates <= 0):
        raise InvalidInputError("interleaf counts must be positive")

    def lz(z):
        return vd_fov_z(fm, d, z, e.k_z)

    def g_func(z):
        return n_of_z(z) * lz(z)

    def dtheta(z):
        return 2 * np.pi * lz(z)

    def theta_rate(z, n):
        return 2 * np.pi * n / n_of_z(z)

    return _build("cylinder-stack", g_func, dtheta, theta_rate, -e.k_z, e.k_z, grid,
                  interleaves=n_of_z, params={"fov": fm, "extent": e, "density": d})


def discretize(path: SpiralPath, offset: float = 0.5) -> DiscretizedPath:
    """Sample the path at ``u = (i + offset) / count`` with ``count = round(N)``."""
    if not 0.0 <= offset < 1.0:
        raise InvalidInputError("offset must lie in [0, 1)")
    count = round_half_up(path.n_real)
    if count < 1:
        raise InvalidInputError(f"path yields {path.n_real:.3g} readouts (< 1)")
    u = (np.arange(count) + offset) / count
    second = path.second(u)
    return DiscretizedPath(path.kind, count, u, path.theta_of_second(second), second)


@dataclass(frozen=True)
class MatchResult:
    scale: float
    path: SpiralPath
    iterations: int


def match_readout_count(designer: Callable[[float], SpiralPath], target: int,
                        lo: float = 1e-3, hi: float = 1e3,
                        max_iter: int = 60) -> MatchResult:
    """Find the FOV scale whose path rounds to ``target`` readouts.

    ``designer(scale)`` must return a path whose ``n_real`` grows with the
    scale.  The bracket is grown geometrically from scale 1, then bisected
    in log-scale until ``|n_real - target| < 0.5``.
    """
    if target < 1:
        raise InvalidInputError("target readout count must be >= 1")
    it = 0

    def evaluate(s):
        nonlocal it
        it += 1
        return designer(s)

    def hit(p):
        return abs(p.n_real - target) < 0.5 and round_half_up(p.n_real) == target

    s = 1.0
    path = evaluate(s)
    if hit(path):
        return MatchResult(s, path, it)
    below = path.n_real < target
    a = b = s
    pb = path
    while (pb.n_real < target) == below:
        b = b * 2.0 if below else b / 2.0
        if not lo <= b <= hi or it >= max_iter:
            raise SearchFailure(f"target {target} not reachable within scale [{lo}, {hi}]")
        pb = evaluate(b)
        a = b / 2.0 if below else b * 2.0
        if hit(pb):
            return MatchResult(b, pb, it)
    s_lo, s_hi = (a, b) if below else (b, a)
    while it < max_iter:
        s = math.sqrt(s_lo * s_hi)
        path = evaluate(s)
        if hit(path):
            return MatchResult(s, path, it)
        if path.n_real < target:
            s_lo = s
        else:
            s_hi = s
    raise SearchFailure(f"no scale within {max_iter} evaluations gives {target} readouts "
                        f"(last {path.n_real:.3f} at scale {s:.6g})")
