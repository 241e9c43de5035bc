import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.interpolate import BSpline

from blhardy.splinecore import (
    DegreeError,
    MAX_ORDER,
    OrderTooLargeError,
    PiecewisePoly,
    bspline,
    bspline_fourier,
    gauss_legendre,
    pp_antiderivative,
    pp_combine,
    pp_derivative,
    pp_eval,
    pp_inner,
    pp_moment,
)


def scipy_bspline(n):
    return BSpline.basis_element(np.arange(n + 2, dtype=float), extrapolate=False)


@pytest.mark.parametrize("n", range(0, 9))
def test_bspline_matches_scipy_basis_element(n):
    x = np.linspace(0.0, n + 1.0, 997, endpoint=False)
    ref = np.nan_to_num(scipy_bspline(n)(x))
    assert np.max(np.abs(bspline(n)(x) - ref)) <= 1e-12


@pytest.mark.parametrize("n, x, value", [(0, 0.5, 1.0), (1, 1.0, 1.0), (2, 1.5, 0.75), (3, 2.0, 2 / 3), (3, 1.0, 1 / 6)])
def test_reference_values(n, x, value):
    assert abs(float(bspline(n)(x)) - value) <= 1e-12


@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("shift", [0.0, -2.5, 3.25])
def test_support_is_exact(n, shift):
    assert bspline(n, shift).support == (shift, shift + n + 1)


@pytest.mark.parametrize("n", range(0, 7))
def test_partition_of_unity_and_symmetry(n):
    x = np.linspace(-2.0, 9.0, 1000)
    total = sum(bspline(n, k)(x) for k in range(-n - 4, 11))
    assert np.max(np.abs(total - 1.0)) <= 1e-12
    t = np.linspace(0.01, n + 0.99, 200)
    assert np.max(np.abs(bspline(n)(t) - bspline(n)(n + 1 - t))) <= 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_derivative_identity(n):
    lhs = pp_derivative(bspline(n))
    rhs = pp_combine([(1.0, bspline(n - 1), 1, 0), (-1.0, bspline(n - 1), 1, 1)])
    x = np.linspace(-1.0, n + 2.0, 1001)
    assert np.max(np.abs(lhs(x) - rhs(x))) <= 1e-12


@pytest.mark.parametrize("n", range(0, 6))
def test_integral_is_one(n):
    F = pp_antiderivative(bspline(n), 0.0, n + 2.0)
    assert abs(float(F(n + 1.5)) - 1.0) <= 1e-12


@pytest.mark.parametrize("n", range(0, 5))
@pytest.mark.parametrize("k", range(-5, 6))
def test_gram_entries_are_bspline_values(n, k):
    # <B_n, B_n(. - k)> = B_{2n+1}(n + 1 + k)
    assert abs(pp_inner(bspline(n), bspline(n, k)) - float(bspline(2 * n + 1)(n + 1 + k))) <= 1e-13


def test_inner_product_against_quad():
    f = bspline(3)
    g = pp_combine([(1.0, bspline(2), 2, 1.0)])
    ref, _ = integrate.quad(lambda x: f(x) * g(x), 0, 4, points=[0.5, 1, 1.5, 2], epsabs=1e-14)
    assert abs(pp_inner(f, g) - ref) <= 1e-12


def test_disjoint_inner_product_is_zero():
    assert pp_inner(bspline(1), bspline(1, 2)) == 0.0


@pytest.mark.parametrize("n", range(0, 6))
def test_fourier_transform_against_quadrature(n):
    for w in (0.0, 0.7, 3.0, -5.0):
        re, _ = integrate.quad(lambda x: bspline(n)(x) * math.cos(w * x), 0, n + 1, points=list(range(1, n + 1)) or None, epsabs=1e-14, limit=200)
        im, _ = integrate.quad(lambda x: -bspline(n)(x) * math.sin(w * x), 0, n + 1, points=list(range(1, n + 1)) or None, epsabs=1e-14, limit=200)
        assert abs(bspline_fourier(n, w) - (re + 1j * im) / math.sqrt(2 * math.pi)) <= 1e-12


@pytest.mark.parametrize("w", [0.0, 1e-12, 1e-8, -3e-7])
def test_fourier_near_zero_matches_first_order_expansion(w):
    # B^_3(w) = (1 - 2 i w + O(w^2)) / sqrt(2 pi)
    ref = (1.0 - 2.0j * w) / math.sqrt(2 * math.pi)
    assert abs(bspline_fourier(3, w) - ref) <= 1e-15 + 10 * w * w


def test_moments_of_bspline():
    # mean of B_n is (n+1)/2, variance (n+1)/12
    for n in range(1, 6):
        c = (n + 1) / 2
        assert abs(pp_moment(bspline(n), 1) - c) <= 1e-12
        assert abs(pp_moment(bspline(n), 2, c) - (n + 1) / 12) <= 1e-12


def test_half_open_convention():
    f = bspline(0)
    assert f(0.0) == 1.0 and f(1.0) == 0.0 and f(-1e-300) == 0.0


def test_order_cap_and_bad_input():
    with pytest.raises(OrderTooLargeError):
        bspline(MAX_ORDER + 1)
    with pytest.raises(ValueError):
        bspline(-1)
    with pytest.raises(DegreeError):
        pp_derivative(bspline(2), 4)
    with pytest.raises(ValueError):
        pp_combine([(1.0, bspline(1), 3, 0)])


def test_derivative_past_degree_is_zero():
    assert pp_derivative(bspline(2), 3).is_zero()


def test_antiderivative_extends_with_constant():
    F = pp_antiderivative(bspline(1), 0.0, 5.0)
    assert abs(float(F(4.5)) - 1.0) <= 1e-15
    assert F.support == (0.0, 5.0)


def test_json_round_trip():
    f = pp_combine([(2.0, bspline(3), 2, -1.0), (-1.0, bspline(1), 1, 0.5)])
    g = PiecewisePoly.from_dict(f.to_dict())
    assert np.array_equal(f.breaks, g.breaks) and np.array_equal(f.coeffs, g.coeffs)


@pytest.mark.parametrize("n", [1, 4, 12, 24])
def test_gauss_legendre_exactness(n):
    x, w = gauss_legendre(n)
    for k in range(2 * n):
        assert abs(np.sum(w * x**k) - 1.0 / (k + 1)) <= 1e-13


small = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), small, small, st.integers(0, 2), small)
def test_combine_is_linear_pointwise(n1, n2, a, b, j, shift):
    f = pp_combine([(a, bspline(n1), 2**j, shift), (b, bspline(n2), 1, 0.0)])
    x = np.linspace(-4, 10, 301)
    ref = a * bspline(n1)(2**j * x - shift) + b * bspline(n2)(x)
    assert np.max(np.abs(f(x) - ref)) <= 1e-11 * (1 + abs(a) + abs(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5), st.floats(-10, 10, allow_nan=False))
def test_shift_preserves_integral_and_norm(n, h):
    f = bspline(n)
    g = f.shifted(h)
    assert abs(pp_inner(g, g) - pp_inner(f, f)) <= 1e-12
    assert abs(pp_moment(g, 0) - 1.0) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6))
def test_derivative_of_antiderivative(n):
    f = bspline(n)
    back = pp_derivative(pp_antiderivative(f))
    x = np.linspace(0, n + 1, 257, endpoint=False)
    assert np.max(np.abs(back(x) - f(x))) <= 1e-12


def test_eval_shapes():
    f = bspline(2)
    assert np.shape(pp_eval(f, 1.0)) == ()
    assert pp_eval(f, np.zeros((3, 4))).shape == (3, 4)
