import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktraj.errors import DomainError, InvalidInputError
from ktraj.geometry import (
    DensityParams,
    ExtentModel,
    FovModel,
    cone_fov,
    extent_at,
    fov_at,
    orthogonal_fov,
    spherical_kr_max,
    spherical_polar_angle,
    spherical_radial_resolution,
    vd_fov_radial,
    vd_fov_z,
    vd_profile,
)

FM = FovModel(28.0, 14.0)


def test_fov_axes():
    assert fov_at(FM, 0.0) == pytest.approx(14.0)
    assert fov_at(FM, np.pi / 2) == pytest.approx(28.0)
    assert orthogonal_fov(FM, 0.0) == pytest.approx(28.0)
    assert orthogonal_fov(FM, np.pi / 2) == pytest.approx(14.0)


def test_cone_fov_axes():
    assert cone_fov(FM, 0.0) == pytest.approx(14.0)
    assert cone_fov(FM, np.pi / 2) == pytest.approx(28.0)


def test_extent_from_resolution():
    e = ExtentModel.from_resolution(0.12, 0.15)
    assert e.k_r == pytest.approx(1 / 0.24)
    assert e.k_z == pytest.approx(1 / 0.30)
    assert e.k_max == e.k_r


@pytest.mark.parametrize("bad", [(0, 1), (1, -2)])
def test_models_reject_nonpositive(bad):
    with pytest.raises(InvalidInputError):
        FovModel(*bad)
    with pytest.raises(InvalidInputError):
        ExtentModel(*bad)


@pytest.mark.parametrize("field", ["alpha", "alpha_r", "alpha_z"])
def test_alpha_below_one_rejected(field):
    with pytest.raises(InvalidInputError):
        DensityParams(**{field: 0.5})


def test_vd_profile_uniform_and_clamped():
    r = np.linspace(0, 1, 11)
    np.testing.assert_allclose(vd_profile(r, 1.0, 0.01), 1.0)
    p = vd_profile(r, 2.0, 0.1)
    assert p[0] == pytest.approx(0.1 ** -0.5)
    assert p[-1] == pytest.approx(1.0)
    assert np.all(np.diff(p) <= 0)


def test_vd_fov_matches_edge():
    e = ExtentModel(2.0, 2.0)
    d = DensityParams(alpha=2.25)
    assert vd_fov_radial(FM, e, d, 2.0, 0.3) == pytest.approx(fov_at(FM, 0.3))
    assert vd_fov_z(FM, DensityParams(alpha_z=2.5), 2.0, 2.0) == pytest.approx(14.0)
    assert vd_fov_z(FM, DensityParams(alpha_z=2.5), 1.0, 2.0) > 14.0


def test_spherical_stack_geometry():
    e = ExtentModel(4.0, 3.0)
    assert spherical_polar_angle(e, 0.0) == pytest.approx(np.pi / 2)
    assert spherical_kr_max(e, 0.0) == pytest.approx(4.0)
    # point on the ellipse: (kr/Kr)^2 + (kz/Kz)^2 = 1
    kz = 1.7
    kr = spherical_kr_max(e, kz)
    assert (kr / 4.0) ** 2 + (kz / 3.0) ** 2 == pytest.approx(1.0)
    assert spherical_kr_max(e, 3.0, floor=0.1) == pytest.approx(0.1)


def test_spherical_resolution_modes():
    e = ExtentModel(4.0, 3.0)
    dmin = 1 / 8.0
    assert spherical_radial_resolution(e, dmin, 0.0) == pytest.approx(dmin)
    assert spherical_radial_resolution(e, dmin, 2.5) > dmin
    assert spherical_radial_resolution(e, dmin, 2.5, mode="min") == pytest.approx(dmin)
    with pytest.raises(DomainError):
        spherical_radial_resolution(e, dmin, 3.5)
    with pytest.raises(InvalidInputError):
        spherical_radial_resolution(e, dmin, 0.0, mode="mid")


@settings(max_examples=60, deadline=None)
@given(st.floats(1, 50), st.floats(1, 50), st.floats(0, np.pi))
def test_ellipse_radius_bounded(lr, lz, phi):
    fm = FovModel(lr, lz)
    v = fov_at(fm, phi)
    assert min(lr, lz) * (1 - 1e-12) <= v <= max(lr, lz) * (1 + 1e-12)
    assert fov_at(fm, phi + np.pi) == pytest.approx(v)
    assert fov_at(fm, np.pi - phi) == pytest.approx(v)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0.01, 3.13))
def test_extent_point_on_ellipse(kr, kz, phi):
    k = extent_at(ExtentModel(kr, kz), phi)
    assert (k * np.sin(phi) / kr) ** 2 + (k * np.cos(phi) / kz) ** 2 == pytest.approx(1.0)
