"""End-to-end pipelines: path, templates, assembled trajectory and DCF for each family."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import Trajectory, synthesize
from .dcf import DcfTable, Support, analytic_dcf
from .geometry import DensityParams, ExtentModel, FovModel
from .numerics import DEFAULT_GRID
from .paths import DiscretizedPath, SpiralPath, discretize, match_readout_count
from .paths import design_cones_path, design_radial_path, design_stack_path
from .templates import (
    HardwareConfig,
    TemplateSet,
    cone_surface_table,
    design_radial_spoke,
    plane_extent,
    spiral_surface_table,
)


@dataclass(eq=False)
class Design:
    kind: str
    fov: FovModel
    extent: ExtentModel
    path: SpiralPath
    discretized: DiscretizedPath
    templates: object
    trajectory: Trajectory
    dcf: DcfTable
    scale: float = 1.0
    match_iterations: int | None = None
    timings: dict = field(default_factory=dict)

    @property
    def n_real(self) -> float:
        return self.path.n_real

    @property
    def count(self) -> int:
        return self.discretized.count

    def summary(self) -> dict:
        t = self.trajectory
        return {
            "kind": self.kind,
            "n_real": float(self.n_real),
            "count": int(self.count),
            "fov_scale": float(self.scale),
            "fov_cm": [self.fov.l_r, self.fov.l_z],
            "extent_per_cm": [self.extent.k_r, self.extent.k_z],
            "match_iterations": self.match_iterations,
            "samples_per_readout_max": int(t.n_samples),
            "total_samples": int(t.lengths.sum()),
            "timings_s": {k: round(v, 4) for k, v in self.timings.items()},
        }


def _matched(designer, target):
    """Run ``designer`` at scale 1 or at the scale matching ``target`` readouts."""
    if target is None:
        return 1.0, designer(1.0), None
    res = match_readout_count(designer, int(target))
    return res.scale, res.path, res.iterations


def design_radial(fm: FovModel, e: ExtentModel, hw: HardwareConfig,
                  grid: int = DEFAULT_GRID, target: int | None = None) -> Design:
    t0 = time.perf_counter()
    scale, path, it = _matched(lambda s: design_radial_path(fm.scaled(s), e, grid), target)
    t1 = time.perf_counter()
    disc = discretize(path)
    spoke = design_radial_spoke(e, hw, 0.0 if e.k_z >= e.k_r else 0.5 * np.pi)
    t2 = time.perf_counter()
    traj = synthesize(disc, spoke, extent=e,
                      meta={"support": Support("ellipsoid", e.k_r, e.k_z)})
    dcf = analytic_dcf(traj, path)
    t3 = time.perf_counter()
    return Design("radial", fm.scaled(scale), e, path, disc, spoke, traj, dcf, scale, it,
                  {"path": t1 - t0, "templates": t2 - t1, "assembly": t3 - t2})


def design_cones(fm: FovModel, e: ExtentModel, d: DensityParams, hw: HardwareConfig,
                 n_surfaces: int = 64, grid: int = DEFAULT_GRID,
                 target: int | None = None) -> Design:
    tables: dict[float, TemplateSet] = {}

    def designer(s):
        tables[s] = cone_surface_table(fm.scaled(s), e, d, hw, n_surfaces)
        return design_cones_path(fm.scaled(s), e, tables[s].interleaves(), grid)

    t0 = time.perf_counter()
    scale, path, it = _matched(designer, target)
    t1 = time.perf_counter()
    disc = discretize(path)
    traj = synthesize(disc, tables[scale],
                      meta={"support": Support("ellipsoid", e.k_r, e.k_z)})
    dcf = analytic_dcf(traj, path)
    t2 = time.perf_counter()
    return Design("cones", fm.scaled(scale), e, path, disc, tables[scale], traj, dcf, scale, it,
                  {"path_and_templates": t1 - t0, "assembly": t2 - t1})


def design_stack(fm: FovModel, e: ExtentModel, d: DensityParams, hw: HardwareConfig,
                 n_surfaces: int = 64, resolution_mode: str = "max",
                 grid: int = DEFAULT_GRID, target: int | None = None) -> Design:
    """Spherical stack of spirals.

    With ``resolution_mode="max"`` the planes shrink with the extent
    ellipsoid; ``"min"`` keeps every plane at full radius (cylindrical
    support).
    """
    tables: dict[float, TemplateSet] = {}

    def designer(s):
        tables[s] = spiral_surface_table(fm.scaled(s), e, d, hw, n_surfaces, resolution_mode)
        return design_stack_path(fm.scaled(s), e, d, tables[s].interleaves(), grid)

    t0 = time.perf_counter()
    scale, path, it = _matched(designer, target)
    t1 = time.perf_counter()
    disc = discretize(path)
    fs = fm.scaled(scale)
    shape = "ellipsoid" if resolution_mode == "max" else "cylinder"
    traj = synthesize(disc, tables[scale],
                      plane_radius=lambda z: plane_extent(fs, e, z, resolution_mode),
                      meta={"support": Support(shape, e.k_r, e.k_z)})
    dcf = analytic_dcf(traj, path)
    t2 = time.perf_counter()
    return Design("stack", fs, e, path, disc, tables[scale], traj, dcf, scale, it,
                  {"path_and_templates": t1 - t0, "assembly": t2 - t1})
