import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktraj import kernels
from ktraj.kernels import _slow

try:
    from ktraj.kernels import _fast
except ImportError:  # extension not built
    _fast = None

needs_fast = pytest.mark.skipif(_fast is None, reason="compiled kernels not built")


@pytest.mark.parametrize("data,expected", [
    (b"", 0xCBF29CE484222325),
    (b"a", 0xAF63DC4C8601EC8C),
    (b"foobar", 0x85944171F73967E8),
])
def test_fnv1a64_vectors(data, expected):
    assert _slow.fnv1a64(data) == expected
    assert kernels.fnv1a64(np.frombuffer(data, dtype=np.uint8)) == expected


def _curve(seed, n):
    r = np.random.default_rng(seed)
    s = np.concatenate(([0.0], np.cumsum(r.uniform(0.001, 0.01, n - 1))))
    kappa = r.uniform(0.0, 50.0, n)
    vcap = r.uniform(0.5, 2.0, n)
    return s, kappa, vcap


@needs_fast
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 400), st.floats(1.0, 200.0))
def test_speed_profile_backends_agree(seed, n, a_max):
    s, kappa, vcap = _curve(seed, n)
    v_fast = _fast.speed_profile(s, kappa, vcap, a_max)
    v_slow = _slow.speed_profile(s, kappa, vcap, a_max)
    np.testing.assert_allclose(v_fast, v_slow, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(_fast.arrival_times(s, np.asarray(v_fast)),
                               _slow.arrival_times(s, v_slow), rtol=1e-12)


@needs_fast
@settings(max_examples=20, deadline=None)
@given(st.binary(max_size=512))
def test_fnv_backends_agree(data):
    assert _fast.fnv1a64(np.frombuffer(data, dtype=np.uint8)) == _slow.fnv1a64(data)


def test_speed_profile_respects_caps():
    s, kappa, vcap = _curve(3, 300)
    v = kernels.speed_profile(s, kappa, vcap, 50.0)
    assert v[0] == 0.0
    assert np.all(v <= vcap + 1e-12)
    # acceleration along the path never exceeds the budget
    dv2 = np.diff(v ** 2) / (2 * np.diff(s))
    assert np.all(np.abs(dv2) <= 50.0 * (1 + 1e-9))


def test_straight_line_triangle_profile():
    s = np.linspace(0, 1.0, 1001)
    v = kernels.speed_profile(s, np.zeros_like(s), np.full_like(s, 1e9), 2.0)
    t = kernels.arrival_times(s, v)
    # no terminal cap: constant acceleration over the whole segment
    assert t[-1] == pytest.approx(np.sqrt(2 * 1.0 / 2.0), rel=1e-9)


def test_pure_python_switch():
    code = "from ktraj import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env={"KTRAJ_PURE_PYTHON": "1",
                         "PATH": ""}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
