import math

import numpy as np
import pytest
from hypothesis import HealthCheck, event, given, settings
from hypothesis import strategies as st

from ktraj.errors import InfeasibleDesign, InvalidInputError
from ktraj.geometry import DensityParams, ExtentModel, FovModel
from ktraj.templates import (
    DESIGN_MARGIN,
    GAMMA_BAR_PROTON,
    HardwareConfig,
    TwistLaw,
    cone_curve,
    cone_surface_table,
    design_cone_template,
    design_radial_spoke,
    design_spiral_template,
    estimate_cone_interleaves,
    estimate_spiral_interleaves,
    slew_of,
    spiral_surface_table,
    spoke_curve,
    template_violations,
    traversal_time,
)

SCANNER_HW = HardwareConfig()
FM = FovModel(28.0, 14.0)
E12 = ExtentModel.from_resolution(0.12)


def test_unit_constant():
    # 1 mT/m for 1 ms moves k by gamma_bar * 1e-2 per cm
    hw = HardwareConfig()
    assert hw.k_rate == pytest.approx(GAMMA_BAR_PROTON * 1e-2)
    assert hw.v_max == pytest.approx(39 * 0.425764)


def _ramp_time(d, hw):
    # start from rest, accelerate to the amplitude limit, then cruise (no braking)
    v = hw.v_max * DESIGN_MARGIN
    a = hw.a_max * DESIGN_MARGIN
    return d / v + v / (2 * a) if d >= v * v / (2 * a) else math.sqrt(2 * d / a)


@pytest.mark.parametrize("length", [0.05, 0.5, 4.1667, 12.0])
def test_spoke_time_matches_ramp(length):
    t = traversal_time(spoke_curve(length), SCANNER_HW)
    expected = math.ceil(_ramp_time(length, SCANNER_HW) / SCANNER_HW.dt - 1e-9) * SCANNER_HW.dt
    assert t == pytest.approx(expected, abs=1e-9)


def test_spoke_template():
    e = ExtentModel(1.25, 1.25)
    hw = HardwareConfig(g_max=10, s_max=100, dt=0.02, t_read=5)
    t = design_radial_spoke(e, hw, 0.0)
    np.testing.assert_allclose(t.k_samples[-1], [0, 0, 1.25], atol=1e-12)
    np.testing.assert_allclose(t.k_samples[:, :2], 0.0)
    assert np.all(np.diff(t.k_samples[:, 2]) > 0)
    assert not template_violations(t.k_samples, t.g_samples, hw)


def test_twist_law_uniform_and_continuity():
    law = TwistLaw(3.0, 2.0)
    np.testing.assert_allclose(law.theta(np.linspace(0, 2, 5)), 3.0 * np.linspace(0, 2, 5))
    vd = TwistLaw(3.0, 2.0, alpha=2.0, floor=0.05)
    assert vd.dtheta(2.0) == pytest.approx(3.0)
    k = np.linspace(0.01, 2.0, 20001)
    num = np.gradient(vd.theta(k), k)
    np.testing.assert_allclose(num[1:-1], vd.dtheta(k)[1:-1], rtol=2e-3)
    num2 = np.gradient(vd.dtheta(k), k)
    ok = k > 0.12
    np.testing.assert_allclose(num2[ok][1:-1], vd.d2theta(k)[ok][1:-1], rtol=2e-3)


def test_cone_template_invariants():
    t = design_cone_template(FM, E12, DensityParams(), SCANNER_HW, 1.0, 40)
    assert not template_violations(t.k_samples, t.g_samples, SCANNER_HW)
    assert t.duration <= SCANNER_HW.t_read + 1e-9
    # every sample lies on the cone at polar angle 1.0
    k = t.k_samples[1:]
    polar = np.arccos(k[:, 2] / np.linalg.norm(k, axis=1))
    np.testing.assert_allclose(polar, 1.0, atol=1e-9)
    assert np.linalg.norm(t.k_samples[-1]) == pytest.approx(E12.k_max, rel=1e-12)


def test_cone_rejects_pole():
    with pytest.raises(InvalidInputError):
        design_cone_template(FM, E12, DensityParams(), SCANNER_HW, 0.0, 4)


def test_interleaves_monotone_in_readout_time():
    counts = [estimate_cone_interleaves(FM, E12, DensityParams(),
                                        HardwareConfig(t_read=t), np.pi / 3)
              for t in (2.0, 2.8, 4.0)]
    assert counts[0] > counts[1] > counts[2] >= 1


def test_interleaves_grow_with_density():
    n1 = estimate_cone_interleaves(FM, E12, DensityParams(), SCANNER_HW, 1.0)
    n2 = estimate_cone_interleaves(FM, E12, DensityParams(alpha=2.25), SCANNER_HW, 1.0)
    assert n2 > n1


def test_smallest_count_is_minimal():
    phi = 0.7
    n = estimate_cone_interleaves(FM, E12, DensityParams(), SCANNER_HW, phi)
    if n > 1:
        assert traversal_time(cone_curve(FM, E12, DensityParams(), phi, n - 1),
                              SCANNER_HW) > SCANNER_HW.t_read


def test_infeasible_readout_reports_minimum():
    hw = HardwareConfig(t_read=0.2)
    with pytest.raises(InfeasibleDesign) as info:
        estimate_cone_interleaves(FM, E12, DensityParams(), hw, 1.0)
    assert info.value.min_t_read > 0.2


def test_spiral_template_in_plane():
    e = ExtentModel.from_resolution(0.12, 0.15)
    fm = FovModel(28, 3)
    n = estimate_spiral_interleaves(fm, e, DensityParams(alpha_r=1.5), HardwareConfig(t_read=3.2),
                                    0.5)
    t = design_spiral_template(fm, e, DensityParams(alpha_r=1.5), HardwareConfig(t_read=3.2),
                               0.5, n)
    np.testing.assert_allclose(t.k_samples[:, 2], 0.5)
    np.testing.assert_allclose(t.g_samples[:, 2], 0.0, atol=1e-9)


def test_surface_tables_are_mirror_symmetric():
    tab = cone_surface_table(FM, ExtentModel.from_resolution(0.44), DensityParams(alpha=2.25),
                             SCANNER_HW, 16)
    np.testing.assert_array_equal(tab.counts, tab.counts[::-1])
    a, b = tab.templates[2], tab.templates[13]
    np.testing.assert_allclose(a.k_samples[:, 2], -b.k_samples[:, 2])
    stab = spiral_surface_table(FovModel(28, 3), ExtentModel.from_resolution(0.12, 0.15),
                                DensityParams(), HardwareConfig(t_read=3.2), 16)
    # smaller planes toward the poles need no more interleaves
    half = stab.counts[8:]
    assert np.all(np.diff(half) <= 0)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    g_max=st.floats(15, 80), s_max=st.floats(60, 250), dt_us=st.sampled_from([2, 4, 6.4, 10]),
    t_read=st.floats(1.0, 5.0), kind=st.sampled_from(["spoke", "cone", "spiral"]),
    res=st.floats(0.1, 0.5), phi=st.floats(0.05, 3.09), alpha=st.floats(1.0, 3.0),
    n=st.integers(1, 80),
)
def test_hardware_limits_hold(g_max, s_max, dt_us, t_read, kind, res, phi, alpha, n):
    hw = HardwareConfig(g_max, s_max, dt_us * 1e-3, t_read)
    e = ExtentModel.from_resolution(res)
    try:
        if kind == "spoke":
            t = design_radial_spoke(e, hw, phi)
        elif kind == "cone":
            t = design_cone_template(FM, e, DensityParams(alpha=alpha), hw, phi, n)
        else:
            z = (phi / np.pi - 0.5) * 2 * e.k_z
            t = design_spiral_template(FovModel(28, 3), e, DensityParams(alpha_r=alpha), hw, z, n)
    except InfeasibleDesign:
        event("infeasible")
        return
    event(f"feasible {kind}")
    assert np.linalg.norm(t.g_samples, axis=1).max() <= g_max + 1e-9
    assert slew_of(t.g_samples, hw.dt).max() <= s_max + 1e-9
    assert not template_violations(t.k_samples, t.g_samples, hw)
    assert t.duration <= t_read + 1e-9
