import numpy as np
import pytest

from ktraj.assembly import rot_y, rot_z, synthesize
from ktraj.design import design_cones, design_stack
from ktraj.errors import AssemblyError
from ktraj.geometry import DensityParams, ExtentModel, FovModel, extent_at
from ktraj.paths import design_radial_path, discretize
from ktraj.templates import HardwareConfig, design_radial_spoke


def test_rotations_are_orthonormal():
    r = rot_z(np.array([0.3, 1.2])) @ rot_y(np.array([0.7, 2.0]))
    np.testing.assert_allclose(r @ np.swapaxes(r, -1, -2), np.broadcast_to(np.eye(3), r.shape),
                               atol=1e-12)


def test_radial_endpoints_on_ellipsoid():
    fm, e = FovModel(10, 5), ExtentModel(0.6, 0.4)
    hw = HardwareConfig(g_max=10, s_max=100, dt=0.02, t_read=5)
    path = design_radial_path(fm, e, grid=8193)
    disc = discretize(path)
    spoke = design_radial_spoke(e, hw, np.pi / 2)
    tr = synthesize(disc, spoke, extent=e)
    tips = tr.k[:, -1]
    np.testing.assert_allclose(np.linalg.norm(tips, axis=1), extent_at(e, disc.second),
                               rtol=1e-12)
    direction = np.column_stack([np.sin(disc.second) * np.cos(disc.theta),
                                 np.sin(disc.second) * np.sin(disc.theta), np.cos(disc.second)])
    np.testing.assert_allclose(tips / np.linalg.norm(tips, axis=1)[:, None], direction,
                               atol=1e-12)
    # gradients rotate with the spoke and keep the k/g relation
    np.testing.assert_allclose(np.diff(tr.k[5], axis=0),
                               tr.g[5, :-1] * hw.k_rate * hw.dt, atol=1e-12)


def test_short_spoke_rejected():
    e = ExtentModel(1.0, 2.0)
    hw = HardwareConfig(g_max=10, s_max=100, dt=0.02, t_read=5)
    disc = discretize(design_radial_path(FovModel(5, 5), e, grid=4097))
    with pytest.raises(AssemblyError):
        synthesize(disc, design_radial_spoke(e, hw, np.pi / 2), extent=e)


def test_cones_readouts_follow_path():
    d = design_cones(FovModel(28, 14), ExtentModel.from_resolution(0.44),
                     DensityParams(alpha=2.25), HardwareConfig(), n_surfaces=16)
    tr = d.trajectory
    assert tr.n_readouts == d.count
    spacing = np.pi / 16
    for i in range(0, tr.n_readouts, 7):
        k = tr.readout(i).k_samples[1:]
        polar = np.arccos(k[:, 2] / np.linalg.norm(k, axis=1))
        assert np.all(np.abs(polar - tr.second[i]) <= spacing / 2 + 1e-9)
    # padding rows are NaN, valid rows finite
    assert np.isfinite(tr.samples()).all()
    assert np.isnan(tr.k[~tr.valid_mask()]).all()


def test_stack_planes_at_path_heights():
    d = design_stack(FovModel(10, 10), ExtentModel(1.25, 1.25), DensityParams(),
                     HardwareConfig(g_max=10, s_max=100, dt=0.02, t_read=3), n_surfaces=16)
    tr = d.trajectory
    for i in range(tr.n_readouts):
        r = tr.readout(i)
        np.testing.assert_allclose(r.k_samples[:, 2], tr.second[i], atol=1e-12)
        kr = np.linalg.norm(r.k_samples[:, :2], axis=1).max()
        assert kr <= 1.25 * (1 + 1e-9)
