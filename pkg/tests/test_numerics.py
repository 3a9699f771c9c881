import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktraj.errors import DomainError, InvalidInputError
from ktraj.numerics import SampledFunction, integrate, invert_monotone, sample, solve_cdf_ode


def test_constant_density_is_linear():
    g = sample(lambda x: np.full_like(x, 3.0), 0.0, 1.0, 1001)
    sol = solve_cdf_ode(g, 0.0, 1.0)
    assert sol.n_total == pytest.approx(3.0, rel=1e-12)
    u = np.linspace(0, 1, 101)
    np.testing.assert_allclose(sol.f_of_u(u), u, atol=1e-12)


def test_linear_density_gives_square_root():
    # g = 2f on [0, 1]  ->  u = f^2
    g = sample(lambda x: 2 * x, 0.0, 1.0, 20001)
    sol = solve_cdf_ode(g, 0.0, 1.0)
    assert sol.n_total == pytest.approx(1.0, rel=1e-8)
    u = np.linspace(0.01, 1, 50)
    np.testing.assert_allclose(sol.f_of_u(u), np.sqrt(u), atol=2e-4)


def test_sine_density_matches_arccos():
    g = sample(np.sin, 0.0, np.pi)
    sol = solve_cdf_ode(g, 0.0, np.pi)
    assert sol.n_total == pytest.approx(2.0, rel=1e-8)
    u = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(sol.f_of_u(u), np.arccos(1 - 2 * u), atol=1e-6)


def test_integrate_subrange():
    g = sample(lambda x: x ** 2, 0.0, 2.0, 40001)
    assert integrate(g, 0.5, 1.5) == pytest.approx((1.5 ** 3 - 0.5 ** 3) / 3, rel=1e-8)


@pytest.mark.parametrize("a,b", [(-0.1, 1.0), (0.0, 1.1), (0.5, 0.5)])
def test_bounds_outside_grid(a, b):
    g = sample(np.ones_like, 0.0, 1.0, 11)
    with pytest.raises(DomainError):
        integrate(g, a, b)


def test_nonpositive_density_rejected():
    g = sample(lambda x: x - 0.5, 0.0, 1.0, 101)
    with pytest.raises(InvalidInputError):
        solve_cdf_ode(g, 0.0, 1.0)


def test_zero_at_endpoints_allowed():
    g = sample(lambda x: x * (1 - x), 0.0, 1.0, 1001)
    assert solve_cdf_ode(g, 0.0, 1.0).n_total == pytest.approx(1 / 6, rel=1e-5)


@pytest.mark.parametrize("x,y", [([0, 1], [0]), ([0], [0]), ([0, 0], [1, 2]), ([1, 0], [0, 1])])
def test_sampled_function_validation(x, y):
    with pytest.raises(InvalidInputError):
        SampledFunction(np.array(x, float), np.array(y, float))


def test_sampled_function_is_read_only():
    f = SampledFunction(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
    with pytest.raises(ValueError):
        f.ordinates[0] = 5.0
    assert f(0.25) == pytest.approx(0.5)
    assert f(3.0) == 2.0  # held outside


def test_invert_rejects_decreasing():
    f = SampledFunction(np.linspace(0, 1, 5), np.array([0, 1, 0.5, 2, 3.0]))
    with pytest.raises(InvalidInputError):
        invert_monotone(f)


def test_invert_flat_stretch():
    f = SampledFunction(np.linspace(0, 1, 5), np.array([0, 1, 1, 1, 2.0]))
    inv = invert_monotone(f)
    assert np.all(np.diff(inv.ordinates) >= 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.05, 5.0), min_size=3, max_size=12))
def test_inverse_composes_to_identity(slopes):
    x = np.linspace(0, 1, len(slopes) + 1)
    y = np.concatenate(([0.0], np.cumsum(slopes) / len(slopes)))
    f = SampledFunction(x, y)
    inv = invert_monotone(f, 4097)
    xs = np.linspace(0, 1, 200)
    # interpolation error: one inverse-grid step times the steepest inverse slope
    tol = (y[-1] - y[0]) / 4096 / min(slopes)
    np.testing.assert_allclose(inv(f(xs)), xs, atol=1.01 * tol + 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.1, 3.0))
def test_cdf_solution_monotone_and_consistent(c0, c1, c2):
    g = sample(lambda x: c0 + c1 * x + c2 * np.sin(np.pi * x) ** 2, 0.0, 1.0, 4097)
    sol = solve_cdf_ode(g, 0.0, 1.0)
    assert np.all(np.diff(sol.f_of_u.ordinates) >= 0)
    assert sol.n_total == pytest.approx(integrate(g, 0.0, 1.0), rel=1e-12)
    u = np.linspace(0.05, 0.95, 30)
    np.testing.assert_allclose(sol.u_of_f(sol.f_of_u(u)), u, atol=1e-6)


@pytest.mark.parametrize("n", [2_000, 20_000])
def test_histogram_matches_density(n):
    g = sample(lambda x: 1 + 3 * x ** 2, 0.0, 1.0)
    sol = solve_cdf_ode(g, 0.0, 1.0)
    f = sol.f_of_u((np.arange(n) + 0.5) / n)
    counts, edges = np.histogram(f, bins=20, range=(0, 1))
    mid = 0.5 * (edges[1:] + edges[:-1])
    expected = (1 + 3 * mid ** 2) / sol.n_total * np.diff(edges)
    assert np.abs(counts / n - expected).sum() < 0.02
