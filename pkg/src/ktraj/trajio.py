"""Trajectory files: a JSON header next to a raw little-endian float32 payload.

Payload layout, row-major, no padding between records::

    [readouts][samples][4] float32 LE = (k_x, k_y, k_z in 1/cm, dcf weight)

Readouts shorter than the longest are padded with NaN coordinates and zero
weight.  The header records the valid length of each readout and the
64-bit FNV-1a checksum of the payload bytes (hex, 16 digits).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from . import kernels
from .assembly import Trajectory
from .dcf import DcfTable, Support
from .errors import InvalidInputError, KtrajError

FORMAT_VERSION = 1
PAYLOAD_DTYPE = np.dtype("<f4")
UNITS = {"k": "1/cm", "weight": "(1/cm)^3", "dt": "ms", "k_rate": "1/cm/ms per mT/m",
         "theta": "rad", "second": "rad (radial, cones) or 1/cm (stack)"}


class TrajectoryIOError(KtrajError):
    category = "io"


def checksum(payload: bytes) -> str:
    return f"{kernels.fnv1a64(np.frombuffer(payload, dtype=np.uint8)):016x}"


def encode_payload(traj: Trajectory, dcf: DcfTable) -> bytes:
    if dcf.weights.shape != traj.k.shape[:2]:
        raise InvalidInputError("DCF table is not aligned with the trajectory")
    rec = np.empty(traj.k.shape[:2] + (4,), dtype=PAYLOAD_DTYPE)
    rec[..., :3] = traj.k
    rec[..., 3] = np.where(traj.valid_mask(), dcf.weights, 0.0)
    return rec.tobytes(order="C")


def _paths(path) -> tuple[Path, Path]:
    p = Path(path)
    stem = p.with_suffix("") if p.suffix in (".json", ".bin") else p
    return stem.with_suffix(".json"), stem.with_suffix(".bin")


def export_trajectory(traj: Trajectory, dcf: DcfTable, path, config: dict | None = None,
                      n_real: float | None = None, extra: dict | None = None) -> tuple[Path, Path]:
    """Write ``<stem>.json`` and ``<stem>.bin``; returns both paths."""
    head_path, data_path = _paths(path)
    payload = encode_payload(traj, dcf)
    support = traj.meta.get("support")
    header = {
        "format_version": FORMAT_VERSION,
        "kind": traj.kind,
        "readouts": int(traj.n_readouts),
        "samples_per_readout": int(traj.n_samples),
        "lengths": [int(n) for n in traj.lengths],
        "layout": "[readouts][samples][4] float32 little-endian: k_x, k_y, k_z, weight",
        "units": UNITS,
        "payload": data_path.name,
        "payload_bytes": len(payload),
        "checksum_fnv1a64": checksum(payload),
        "n_real": None if n_real is None else float(n_real),
        "dt": float(traj.dt),
        "k_rate": float(traj.k_rate),
        "dcf_normalization": float(dcf.normalization),
        "support": None if support is None else [support.shape, support.k_r, support.k_z],
        "theta": [float(v) for v in traj.theta],
        "second": [float(v) for v in traj.second],
        "template_ref": [float(v) for v in traj.template_ref],
        "config": config,
    }
    if extra:
        header.update(extra)
    try:
        head_path.parent.mkdir(parents=True, exist_ok=True)
        data_path.write_bytes(payload)
        head_path.write_text(json.dumps(header, indent=1) + "\n")
    except OSError as exc:
        raise TrajectoryIOError(f"cannot write {head_path} / {data_path}: {exc}") from exc
    return head_path, data_path


def read_header(path) -> dict:
    head_path, _ = _paths(path)
    try:
        header = json.loads(head_path.read_text())
    except OSError as exc:
        raise TrajectoryIOError(f"cannot read {head_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TrajectoryIOError(f"{head_path}: malformed header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise TrajectoryIOError(f"{head_path}: unsupported format version "
                                f"{header.get('format_version')!r}")
    return header


def import_trajectory(path, verify: bool = True) -> tuple[Trajectory, DcfTable, dict]:
    """Read a trajectory written by :func:`export_trajectory`.

    Coordinates come back as the stored float32 values.  Gradients are not
    stored; they are rebuilt from sample differences.
    """
    head_path, _ = _paths(path)
    header = read_header(head_path)
    data_path = head_path.parent / header["payload"]
    try:
        payload = data_path.read_bytes()
    except OSError as exc:
        raise TrajectoryIOError(f"cannot read {data_path}: {exc}") from exc
    r, s = header["readouts"], header["samples_per_readout"]
    if len(payload) != r * s * 4 * PAYLOAD_DTYPE.itemsize:
        raise TrajectoryIOError(f"{data_path}: {len(payload)} bytes, header expects "
                                f"{r} x {s} x 4 float32")
    if verify and checksum(payload) != header["checksum_fnv1a64"]:
        raise TrajectoryIOError(f"{data_path}: checksum mismatch")
    rec = np.frombuffer(payload, dtype=PAYLOAD_DTYPE).reshape(r, s, 4)
    k = rec[..., :3].astype(float)
    w = rec[..., 3].astype(float)
    lengths = np.asarray(header["lengths"], dtype=int)
    dt, k_rate = header["dt"], header["k_rate"]
    g = np.full_like(k, np.nan)
    for i, n in enumerate(lengths):
        if n > 1:
            d = np.diff(k[i, :n], axis=0) / (k_rate * dt)
            g[i, :n] = np.vstack([d, d[-1:]])
        elif n == 1:
            g[i, 0] = 0.0
    meta = {}
    if header.get("support"):
        meta["support"] = Support(*header["support"])
    traj = Trajectory(header["kind"], k, g, lengths, np.asarray(header["theta"]),
                      np.asarray(header["second"]), np.asarray(header["template_ref"]),
                      dt, k_rate, meta)
    return traj, DcfTable(w, header.get("dcf_normalization", 1.0)), header


def default_output_dir() -> Path:
    return Path(os.environ.get("KTRAJ_OUT", "."))
