"""Rotate templates onto the discretized path to form the full trajectory."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AssemblyError
from .geometry import ExtentModel, extent_at
from .paths import DiscretizedPath
from .templates import Template, TemplateSet

KIND_OF_PATH = {
    "ellipsoid-radial": "radial",
    "ellipsoid-cones": "cones",
    "cylinder-stack": "stack",
}


def rot_y(phi):
    c, s = np.cos(phi), np.sin(phi)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.stack([np.stack([c, z, s], -1), np.stack([z, o, z], -1),
                     np.stack([-s, z, c], -1)], -2)


def rot_z(theta):
    c, s = np.cos(theta), np.sin(theta)
    z, o = np.zeros_like(c), np.ones_like(c)
    return np.stack([np.stack([c, -s, z], -1), np.stack([s, c, z], -1),
                     np.stack([z, z, o], -1)], -2)


@dataclass(frozen=True)
class Readout:
    index: int
    template_ref: float
    rotation: tuple
    k_samples: np.ndarray


@dataclass(eq=False)
class Trajectory:
    """All readouts of a design.

    ``k`` and ``g`` have shape ``(readouts, samples, 3)``; readouts shorter
    than the longest are padded with NaN, ``lengths`` gives the valid count.
    ``g`` follows the template convention (gradient held until the next
    sample).
    """

    kind: str
    k: np.ndarray
    g: np.ndarray
    lengths: np.ndarray
    theta: np.ndarray
    second: np.ndarray
    template_ref: np.ndarray
    dt: float
    k_rate: float
    meta: dict = field(default_factory=dict)

    @property
    def n_readouts(self) -> int:
        return self.k.shape[0]

    @property
    def n_samples(self) -> int:
        return self.k.shape[1]

    def valid_mask(self) -> np.ndarray:
        return np.arange(self.n_samples)[None, :] < self.lengths[:, None]

    def samples(self) -> np.ndarray:
        """Valid sample positions, flattened readout by readout."""
        return self.k[self.valid_mask()]

    def readout(self, i: int) -> Readout:
        n = int(self.lengths[i])
        return Readout(i, float(self.template_ref[i]),
                       (float(self.theta[i]), float(self.second[i])), self.k[i, :n])

    def readouts(self):
        return [self.readout(i) for i in range(self.n_readouts)]


def _pack(ks, gs):
    n = max(k.shape[0] for k in ks)
    r = len(ks)
    k_out = np.full((r, n, 3), np.nan)
    g_out = np.full((r, n, 3), np.nan)
    lengths = np.empty(r, dtype=int)
    for i, (k, g) in enumerate(zip(ks, gs)):
        m = k.shape[0]
        k_out[i, :m] = k
        g_out[i, :m] = g
        lengths[i] = m
    return k_out, g_out, lengths


def synthesize(path: DiscretizedPath, templates, extent: ExtentModel | None = None,
               plane_radius=None, meta: dict | None = None) -> Trajectory:
    """Build the trajectory for ``path`` from ``templates``.

    Radial: ``templates`` is the +k_z spoke (a :class:`Template`), rotated by
    ``R_z(theta) R_y(phi)``; with ``extent`` given the spoke is shortened to
    ``K(phi)`` by scaling its waveform.  Cones: the template of the nearest
    cone in the :class:`TemplateSet` is rotated by ``R_z(theta)``.  Stack:
    the template of the nearest plane on the equator side is moved to
    ``k_z = z``, scaled down to ``plane_radius(z)`` when that callable is
    given, and rotated by ``R_z(theta)``.
    """
    kind = KIND_OF_PATH[path.kind]
    meta = dict(meta or {})
    if kind == "radial":
        spoke = templates[0] if isinstance(templates, (list, tuple)) else templates
        if not isinstance(spoke, Template):
            raise AssemblyError("radial assembly needs a single spoke template")
        scale = np.ones(path.count)
        if extent is not None:
            scale = extent_at(extent, path.second) / spoke.extent
            if np.any(scale > 1 + 1e-9):
                raise AssemblyError("spoke template is shorter than the design extent")
        rot = rot_z(path.theta) @ rot_y(path.second)
        k = np.einsum("rij,sj->rsi", rot, spoke.k_samples) * scale[:, None, None]
        g = np.einsum("rij,sj->rsi", rot, spoke.g_samples) * scale[:, None, None]
        lengths = np.full(path.count, spoke.n_samples)
        refs = np.zeros(path.count)
        hw = spoke.hardware
    else:
        if not isinstance(templates, TemplateSet) or not templates.templates:
            raise AssemblyError(f"{kind} assembly needs a TemplateSet")
        ks, gs, refs = [], [], []
        half = 0.5 * templates.spacing
        lab = templates.labels
        for theta, second in zip(path.theta, path.second):
            if kind == "cones":
                j = templates.nearest(second)
                if abs(lab[j] - second) > half * (1 + 1e-9):
                    raise AssemblyError(f"no cone template within {half:.3g} rad of {second:.4g}")
                t = templates.templates[j]
                tk, tg = t.k_samples, t.g_samples
            else:
                j = _equatorward(lab, second)
                if abs(lab[j] - second) > 2 * half * (1 + 1e-9):
                    raise AssemblyError(f"no plane template near k_z = {second:.4g}")
                t = templates.templates[j]
                c = 1.0
                if plane_radius is not None:
                    c = min(1.0, float(plane_radius(second)) / t.extent)
                tk = t.k_samples * np.array([c, c, 0.0]) + np.array([0.0, 0.0, second])
                tg = t.g_samples * np.array([c, c, 0.0])
            r = rot_z(theta)
            ks.append(tk @ r.T)
            gs.append(tg @ r.T)
            refs.append(lab[j])
        k, g, lengths = _pack(ks, gs)
        refs = np.asarray(refs)
        hw = templates.templates[0].hardware
    return Trajectory(kind, k, g, lengths, np.asarray(path.theta), np.asarray(path.second),
                      refs, hw.dt, hw.k_rate, meta)


def _equatorward(labels, value):
    """Index of the nearest label with ``|label| <= |value|`` (nearest overall if none)."""
    ok = np.abs(labels) <= abs(value) + 1e-12
    if not ok.any():
        return int(np.argmin(np.abs(labels - value)))
    idx = np.nonzero(ok)[0]
    return int(idx[np.argmin(np.abs(labels[idx] - value))])
