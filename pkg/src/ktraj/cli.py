"""Command-line entry point: ``ktraj <subcommand> --config design.yaml [options]``.

Every run writes a JSON run report (effective configuration, readout counts,
timings) to the output directory and prints it.  Failures print a JSON
object with a machine-readable ``error`` category to stderr and exit 1.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .analysis import alias_onset, compute_psf, fwhm, sphere_uniformity
from .config import apply_overrides, load_document, parse_config
from .dcf import relative_rms, support_of, voronoi_dcf_oracle
from .design import design_cones, design_radial, design_stack
from .errors import ConfigError, InvalidInputError, KtrajError
from .trajio import (
    TrajectoryIOError,
    default_output_dir,
    export_trajectory,
    import_trajectory,
    read_header,
)

DESIGN_COMMANDS = ("radial", "cones", "stack")


def _grid(text):
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected nx,ny,nz") from None
    if len(parts) == 1:
        parts *= 3
    if len(parts) != 3 or min(parts) < 1:
        raise argparse.ArgumentTypeError("expected three positive integers nx,ny,nz")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ktraj", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML or JSON design document")
    common.add_argument("--out", help="output directory (default: $KTRAJ_OUT or .)")
    common.add_argument("--target-readouts", type=int, help="match this readout count")
    common.add_argument("--alpha", type=float)
    common.add_argument("--alpha-r", type=float)
    common.add_argument("--alpha-z", type=float)
    common.add_argument("--seed", type=int)

    for name in DESIGN_COMMANDS:
        sub.add_parser(name, parents=[common], help=f"design a {name} trajectory and export it")
    p = sub.add_parser("dcf-check", parents=[common],
                       help="compare the analytic DCF with the Monte-Carlo Voronoi oracle")
    p.add_argument("--mc-points", type=int)
    p = sub.add_parser("psf", parents=[common], help="point-spread function by direct summation")
    p.add_argument("--grid", type=_grid, help="voxel grid nx,ny,nz")
    p = sub.add_parser("uniformity", parents=[common],
                       help="spherical Voronoi-area statistics of readout directions")
    p.add_argument("--mc-points", type=int)
    p = sub.add_parser("info", help="summarise and verify a trajectory file")
    p.add_argument("file", help="header (.json) or payload (.bin) path")
    return ap


def _load(args, kind=None):
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    doc = load_document(text)
    if kind is not None:
        doc.setdefault("kind", kind)
        if doc["kind"] != kind:
            raise ConfigError(f"kind: config is {doc['kind']!r} but the subcommand is {kind!r}")
    cfg = parse_config(doc)
    return apply_overrides(
        cfg, target_readouts=args.target_readouts, alpha=args.alpha, alpha_r=args.alpha_r,
        alpha_z=args.alpha_z, seed=args.seed, output_dir=args.out,
        mc_points=getattr(args, "mc_points", None), psf_grid=getattr(args, "grid", None))


def run_design(cfg):
    e = cfg.extent
    if cfg.kind == "radial":
        return design_radial(cfg.fov, e, cfg.hardware, cfg.grid, cfg.target_readouts)
    if cfg.kind == "cones":
        return design_cones(cfg.fov, e, cfg.density, cfg.hardware, cfg.n_surfaces, cfg.grid,
                            cfg.target_readouts)
    return design_stack(cfg.fov, e, cfg.density, cfg.hardware, cfg.n_surfaces,
                        cfg.resolution_mode, cfg.grid, cfg.target_readouts)


def _outdir(cfg) -> Path:
    return Path(cfg.output_dir) if cfg.output_dir else default_output_dir()


def _report(cfg, command, body, started):
    rep = {"command": command, "config": cfg.to_dict(), "backend": kernels.BACKEND}
    rep.update(body)
    rep["elapsed_s"] = round(time.perf_counter() - started, 4)
    out = _outdir(cfg)
    stem = cfg.output_stem or cfg.kind
    name = "report" if command in DESIGN_COMMANDS else f"{command}_report"
    path = out / f"{stem}_{name}.json"
    try:
        out.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(rep, indent=2) + "\n")
    except OSError as exc:
        raise TrajectoryIOError(f"cannot write report {path}: {exc}") from exc
    print(json.dumps(rep, indent=2))
    return rep


def _path_curve(design, n=512):
    u = np.linspace(0.0, 1.0, n)
    p = design.path
    return {"axis": "u", "u": u.tolist(), "theta": p.theta(u).tolist(),
            "second": p.second(u).tolist(),
            "second_name": "k_z" if design.kind == "stack" else "phi"}


def cmd_design(args, started):
    cfg = _load(args, args.command)
    d = run_design(cfg)
    stem = _outdir(cfg) / (cfg.output_stem or cfg.kind)
    head, data = export_trajectory(d.trajectory, d.dcf, stem, cfg.to_dict(), d.n_real)
    curve = stem.parent / f"{stem.name}_path.json"
    try:
        curve.write_text(json.dumps(_path_curve(d)) + "\n")
    except OSError as exc:
        raise TrajectoryIOError(f"cannot write {curve}: {exc}") from exc
    body = d.summary()
    body.update({"header": str(head), "payload": str(data), "path_curve": str(curve)})
    return _report(cfg, args.command, body, started)


def cmd_dcf_check(args, started):
    cfg = _load(args)
    d = run_design(cfg)
    traj = d.trajectory
    n = int(traj.lengths.sum())
    mc = cfg.mc_points or 400 * n
    oracle = voronoi_dcf_oracle(traj, mc, cfg.seed)
    sup = support_of(traj)
    k = traj.samples()
    r = np.sqrt((k[:, 0] ** 2 + k[:, 1] ** 2) / sup.k_r ** 2 + (k[:, 2] / sup.k_z) ** 2)
    sel = (r >= 0.2) & (r <= 0.9)
    rms = relative_rms(d.dcf.flat(traj)[sel], oracle.flat(traj)[sel])
    body = d.summary()
    body.update({"mc_points": mc, "compared_samples": int(sel.sum()),
                 "radius_window": [0.2, 0.9], "relative_rms": rms})
    return _report(cfg, "dcf-check", body, started)


def cmd_psf(args, started):
    cfg = _load(args)
    d = run_design(cfg)
    fov = cfg.psf_fov or max(d.fov.l_r, d.fov.l_z)
    img = compute_psf(d.trajectory, d.dcf, cfg.psf_grid, fov)
    widths = [fwhm(img.profile(a), img.voxel_size[a]) for a in range(3)]
    onset = []
    for a in range(3):
        try:
            onset.append(alias_onset(img, a, 2 * widths[a]))
        except InvalidInputError:
            onset.append(None)
    mag = img.magnitude()
    planes = {}
    for name in ("axial", "coronal", "sagittal"):
        pl = np.abs(img.plane(name))
        planes[name] = {"shape": list(pl.shape), "values": pl.ravel().round(6).tolist()}
    out = _outdir(cfg) / f"{cfg.output_stem or cfg.kind}_psf.json"
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps({
            "grid_shape": list(img.grid_shape), "voxel_size_cm": list(img.voxel_size),
            "axes_cm": [img.axis_coords(a).tolist() for a in range(3)],
            "planes": planes}) + "\n")
    except OSError as exc:
        raise TrajectoryIOError(f"cannot write {out}: {exc}") from exc
    body = d.summary()
    body.update({"grid": list(img.grid_shape), "render_fov_cm": fov,
                 "fwhm_cm": widths, "alias_onset_cm": onset,
                 "center_is_max": bool(np.unravel_index(np.argmax(mag), mag.shape)
                                       == img.center),
                 "planes_file": str(out)})
    return _report(cfg, "psf", body, started)


def cmd_uniformity(args, started):
    cfg = _load(args)
    if cfg.kind == "stack":
        raise InvalidInputError("uniformity applies to radial and cones designs")
    d = run_design(cfg)
    th, ph = d.discretized.theta, d.discretized.second
    pts = np.column_stack([np.sin(ph) * np.cos(th), np.sin(ph) * np.sin(th), np.cos(ph)])
    mc = cfg.mc_points or max(2_000_000, 1000 * len(pts))
    stats = sphere_uniformity(pts, mc, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    rnd = sphere_uniformity(rng.standard_normal(pts.shape), mc, cfg.seed)
    body = d.summary()
    body.update({"mc_points": mc, "path_points": vars(stats), "random_points": vars(rnd)})
    return _report(cfg, "uniformity", body, started)


def cmd_info(args):
    header = read_header(args.file)
    traj, dcf, _ = import_trajectory(args.file, verify=True)
    summary = {k: header[k] for k in ("format_version", "kind", "readouts",
                                      "samples_per_readout", "n_real", "checksum_fnv1a64")}
    summary["valid_samples"] = int(traj.lengths.sum())
    summary["checksum_ok"] = True
    summary["weight_sum"] = float(dcf.flat(traj).sum())
    print(json.dumps(summary, indent=2))
    return summary


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    started = time.perf_counter()
    try:
        if args.command in DESIGN_COMMANDS:
            cmd_design(args, started)
        elif args.command == "dcf-check":
            cmd_dcf_check(args, started)
        elif args.command == "psf":
            cmd_psf(args, started)
        elif args.command == "uniformity":
            cmd_uniformity(args, started)
        else:
            cmd_info(args)
    except KtrajError as exc:
        err = {"error": exc.category, "message": str(exc)}
        if getattr(exc, "min_t_read", None) is not None:
            err["min_t_read"] = exc.min_t_read
        print(json.dumps(err), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
