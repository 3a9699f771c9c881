"""Design configuration documents (YAML or JSON) and their validation.

Document layout, all sections optional except ``kind``, ``fov`` and
``resolution``::

    kind: cones                  # radial | cones | stack
    fov: [28, 14]                # l_r, l_z in cm; or {l_r: .., l_z: ..}; one number = isotropic
    resolution: [4.4, 4.4]       # voxel size in mm; or {dxy: .., dz: ..}
    hardware:
      t_read: 2.8                # ms
      g_max: 39                  # mT/m
      s_max: 145                 # mT/m/ms
      dt: 4                      # us
      gamma_bar: 42.5764         # kHz/mT
    density: {alpha: 2.25, alpha_r: 1, alpha_z: 1}
    target_readouts: 32          # optional
    seed: 0
    design: {n_surfaces: 64, grid: 65536, resolution_mode: max}
    analysis: {mc_points: null, psf_grid: [64, 64, 64], psf_fov: null}
    output: {dir: null, stem: null}
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import yaml

from .errors import ConfigError, InvalidInputError
from .geometry import DensityParams, ExtentModel, FovModel
from .numerics import DEFAULT_GRID
from .templates import GAMMA_BAR_PROTON, HardwareConfig

KINDS = ("radial", "cones", "stack")

DEFAULTS = {
    "hardware": {"t_read": 2.8, "g_max": 39.0, "s_max": 145.0, "dt": 4.0,
                 "gamma_bar": GAMMA_BAR_PROTON},
    "density": {"alpha": 1.0, "alpha_r": 1.0, "alpha_z": 1.0},
    "target_readouts": None,
    "seed": 0,
    "design": {"n_surfaces": 64, "grid": DEFAULT_GRID, "resolution_mode": "max"},
    "analysis": {"mc_points": None, "psf_grid": [64, 64, 64], "psf_fov": None},
    "output": {"dir": None, "stem": None},
}


@dataclass(frozen=True)
class DesignConfig:
    kind: str
    fov: FovModel
    resolution_mm: tuple
    hardware: HardwareConfig
    density: DensityParams
    target_readouts: int | None = None
    seed: int = 0
    n_surfaces: int = 64
    grid: int = DEFAULT_GRID
    resolution_mode: str = "max"
    mc_points: int | None = None
    psf_grid: tuple = (64, 64, 64)
    psf_fov: float | None = None
    output_dir: str | None = None
    output_stem: str | None = None
    document: dict = field(default_factory=dict, compare=False)

    @property
    def extent(self) -> ExtentModel:
        dxy, dz = self.resolution_mm
        return ExtentModel.from_resolution(dxy / 10.0, dz / 10.0)

    def to_dict(self) -> dict:
        """The effective configuration, defaults filled, in document form."""
        return copy.deepcopy(self.document)


def _pair(value, where, names):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value), float(value)
    if isinstance(value, dict):
        if set(value) != set(names):
            raise ConfigError(f"{where}: expected keys {names[0]} and {names[1]}")
        value = [value[names[0]], value[names[1]]]
    if isinstance(value, (list, tuple)) and len(value) == 2:
        try:
            return float(value[0]), float(value[1])
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: entries must be numbers") from None
    raise ConfigError(f"{where}: expected a number or a pair of numbers")


def _positive(x, where):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {x!r}") from None
    if not x > 0:
        raise ConfigError(f"{where}: must be positive, got {x}")
    return x


def _merge(defaults, given, where):
    out = copy.deepcopy(defaults)
    if given is None:
        return out
    if not isinstance(given, dict):
        raise ConfigError(f"{where}: expected a mapping")
    for k, v in given.items():
        if k not in defaults:
            raise ConfigError(f"{where}.{k}: unknown field")
        out[k] = v
    return out


def load_document(text: str) -> dict:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping")
    return doc


def parse_config(text_or_doc) -> DesignConfig:
    """Validate a configuration document and fill in defaults.

    Raises
    ------
    ConfigError
        With the dotted path of the offending field.
    """
    doc = load_document(text_or_doc) if isinstance(text_or_doc, str) else dict(text_or_doc)
    allowed = {"kind", "fov", "resolution"} | set(DEFAULTS)
    for k in doc:
        if k not in allowed:
            raise ConfigError(f"{k}: unknown field")
    for k in ("kind", "fov", "resolution"):
        if doc.get(k) is None:
            raise ConfigError(f"{k}: missing required field")
    kind = doc["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind: unknown trajectory kind {kind!r} (choose from {', '.join(KINDS)})")
    fov = tuple(_positive(v, "fov") for v in _pair(doc["fov"], "fov", ("l_r", "l_z")))
    res = tuple(_positive(v, "resolution")
                for v in _pair(doc["resolution"], "resolution", ("dxy", "dz")))

    hw_doc = _merge(DEFAULTS["hardware"], doc.get("hardware"), "hardware")
    hw_vals = {k: _positive(v, f"hardware.{k}") for k, v in hw_doc.items()}
    den_doc = _merge(DEFAULTS["density"], doc.get("density"), "density")
    for k, v in den_doc.items():
        _positive(v, f"density.{k}")
        if float(v) < 1.0:
            raise ConfigError(f"density.{k}: variable-density exponents must be >= 1, got {v}")
    des = _merge(DEFAULTS["design"], doc.get("design"), "design")
    ana = _merge(DEFAULTS["analysis"], doc.get("analysis"), "analysis")
    out = _merge(DEFAULTS["output"], doc.get("output"), "output")

    target = doc.get("target_readouts")
    if target is not None:
        if isinstance(target, bool) or not isinstance(target, int) or target < 1:
            raise ConfigError(f"target_readouts: must be an integer >= 1, got {target!r}")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed: must be a non-negative integer, got {seed!r}")
    for k in ("n_surfaces", "grid"):
        v = des[k]
        if isinstance(v, bool) or not isinstance(v, int) or v < 2:
            raise ConfigError(f"design.{k}: must be an integer >= 2, got {v!r}")
    if des["resolution_mode"] not in ("max", "min"):
        raise ConfigError("design.resolution_mode: must be 'max' or 'min'")
    mc = ana["mc_points"]
    if mc is not None and (isinstance(mc, bool) or not isinstance(mc, int) or mc < 1):
        raise ConfigError(f"analysis.mc_points: must be a positive integer, got {mc!r}")
    grid = ana["psf_grid"]
    if isinstance(grid, int):
        grid = [grid] * 3
    if not (isinstance(grid, (list, tuple)) and len(grid) == 3
            and all(isinstance(n, int) and n > 0 for n in grid)):
        raise ConfigError("analysis.psf_grid: expected three positive integers")
    psf_fov = None if ana["psf_fov"] is None else _positive(ana["psf_fov"], "analysis.psf_fov")

    try:
        hardware = HardwareConfig(hw_vals["g_max"], hw_vals["s_max"], hw_vals["dt"] * 1e-3,
                                  hw_vals["t_read"], hw_vals["gamma_bar"])
        density = DensityParams(float(den_doc["alpha"]), float(den_doc["alpha_r"]),
                                float(den_doc["alpha_z"]))
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None

    effective = {
        "kind": kind, "fov": list(fov), "resolution": list(res),
        "hardware": {k: float(v) for k, v in hw_vals.items()},
        "density": {k: float(v) for k, v in den_doc.items()},
        "target_readouts": target, "seed": seed, "design": des,
        "analysis": {"mc_points": mc, "psf_grid": list(grid), "psf_fov": psf_fov},
        "output": out,
    }
    return DesignConfig(kind, FovModel(*fov), res, hardware, density, target, seed,
                        des["n_surfaces"], des["grid"], des["resolution_mode"], mc,
                        tuple(grid), psf_fov, out["dir"], out["stem"], effective)


def apply_overrides(cfg: DesignConfig, **overrides) -> DesignConfig:
    """Re-validate ``cfg`` with command-line overrides applied (``None`` = keep)."""
    doc = cfg.to_dict()
    mapping = {
        "target_readouts": ("target_readouts",),
        "alpha": ("density", "alpha"),
        "alpha_r": ("density", "alpha_r"),
        "alpha_z": ("density", "alpha_z"),
        "seed": ("seed",),
        "mc_points": ("analysis", "mc_points"),
        "psf_grid": ("analysis", "psf_grid"),
        "output_dir": ("output", "dir"),
    }
    for name, value in overrides.items():
        if value is None:
            continue
        keys = mapping[name]
        node = doc
        for k in keys[:-1]:
            node = node[k]
        node[keys[-1]] = list(value) if isinstance(value, tuple) else value
    return parse_config(doc)


def dump_config(cfg: DesignConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
