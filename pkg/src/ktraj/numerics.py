"""Quadrature and CDF inversion for the spiral-path ODE ``df/du = N / g(f)``.

The path coordinate ``f(u)`` is recovered from the density ``g`` by treating
the normalised cumulative integral of ``g`` as a distribution function and
inverting it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError

DEFAULT_GRID = 65536
TIE_EPS = 1e-12


@dataclass(frozen=True)
class SampledFunction:
    """A real function tabulated on a strictly increasing grid.

    Evaluation between nodes is piecewise linear; outside the grid the end
    values are held.
    """

    abscissae: np.ndarray
    ordinates: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        y = np.asarray(self.ordinates, dtype=float)
        if x.ndim != 1 or y.shape != x.shape:
            raise InvalidInputError("abscissae and ordinates must be 1-D and equal length")
        if x.size < 2:
            raise InvalidInputError("a sampled function needs at least 2 points")
        if np.any(np.diff(x) <= 0):
            raise InvalidInputError("abscissae must be strictly increasing")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "ordinates", y)

    def __call__(self, x):
        return np.interp(x, self.abscissae, self.ordinates)

    def __len__(self):
        return self.abscissae.size

    @property
    def lo(self) -> float:
        return float(self.abscissae[0])

    @property
    def hi(self) -> float:
        return float(self.abscissae[-1])


@dataclass(frozen=True)
class CdfSolution:
    n_total: float
    u_of_f: SampledFunction
    f_of_u: SampledFunction
    f_min: float
    f_max: float


def sample(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
           n: int = DEFAULT_GRID) -> SampledFunction:
    """Tabulate ``func`` on ``n`` uniformly spaced points of ``[a, b]``."""
    x = np.linspace(a, b, n)
    return SampledFunction(x, np.broadcast_to(func(x), x.shape).astype(float))


def _restrict(g: SampledFunction, a: float, b: float):
    if not a < b:
        raise DomainError(f"integration bounds must satisfy a < b (got {a}, {b})")
    x = g.abscissae
    span = x[-1] - x[0]
    tol = 1e-12 * span
    if a < x[0] - tol or b > x[-1] + tol:
        raise DomainError(
            f"bounds [{a}, {b}] fall outside the tabulated range [{x[0]}, {x[-1]}]")
    a = max(a, x[0])
    b = min(b, x[-1])
    inner = (x > a) & (x < b)
    xs = np.concatenate(([a], x[inner], [b]))
    ys = np.concatenate(([g(a)], g.ordinates[inner], [g(b)]))
    return xs, ys


def _cumtrapz(x, y):
    out = np.empty_like(x)
    out[0] = 0.0
    np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x), out=out[1:])
    return out


def integrate(g: SampledFunction, a: float, b: float) -> float:
    """Composite trapezoid integral of ``g`` over ``[a, b]``."""
    xs, ys = _restrict(g, a, b)
    return float(_cumtrapz(xs, ys)[-1])


def invert_monotone(f: SampledFunction, n: int | None = None,
                    tie_tol: float = 1e-9) -> SampledFunction:
    """Invert an increasing tabulated function.

    The result is tabulated on ``n`` uniform points spanning the ordinate
    range (default: as many points as the input).  Flat stretches are made
    strictly increasing by an ``1e-12`` step per tied sample; any decrease
    larger than ``tie_tol`` times the ordinate range is rejected.
    """
    x, y = f.abscissae, f.ordinates
    span = y[-1] - y[0]
    if not span > 0:
        raise InvalidInputError("function to invert has no increasing range")
    dy = np.diff(y)
    if np.any(dy < -tie_tol * span):
        raise InvalidInputError("function to invert is not monotonically increasing")
    if np.any(dy <= 0):
        dy = np.maximum(dy, TIE_EPS)
        y = y[0] + np.concatenate(([0.0], np.cumsum(dy)))
    n = len(f) if n is None else int(n)
    grid = np.linspace(y[0], y[-1], n)
    return SampledFunction(grid, np.interp(grid, y, x))


def solve_cdf_ode(g: SampledFunction, f_min: float, f_max: float,
                  n_inverse: int | None = None) -> CdfSolution:
    """Solve ``df/du = N / g(f)`` on ``u in (0, 1)`` with ``f`` in ``(f_min, f_max)``.

    ``N`` is the integral of ``g``; ``u(f)`` is the normalised cumulative
    integral and ``f(u)`` its inverse.
    """
    if not f_min < f_max:
        raise InvalidInputError("f_min must be smaller than f_max")
    xs, ys = _restrict(g, f_min, f_max)
    if np.any(ys[1:-1] <= 0) or np.any(ys < 0):
        raise InvalidInputError("g must be positive on the open interval (f_min, f_max)")
    cum = _cumtrapz(xs, ys)
    n_total = float(cum[-1])
    if not n_total > 0:
        raise InvalidInputError("integral of g is not positive")
    u_of_f = SampledFunction(xs, cum / n_total)
    f_of_u = invert_monotone(u_of_f, n_inverse)
    return CdfSolution(n_total, u_of_f, f_of_u, float(f_min), float(f_max))
