import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blhardy.splinecore import bspline, pp_inner, pp_moment
from blhardy.wavelet_construct import (
    ParityError,
    aux_coefficients,
    euler_frobenius,
    gram_symbol,
    lambda_coeffs,
    localized_basis,
    localized_scaling,
    localized_wavelet,
    periodized_symbol,
    tensor_basis,
)


def test_order_one_reference_values():
    ef = euler_frobenius(1)
    r = 2.0 - math.sqrt(3.0)
    assert np.allclose(ef.gram, [1 / 6, 2 / 3, 1 / 6], rtol=0, atol=1e-15)
    assert abs(ef.roots[0] - r) <= 1e-12
    assert abs(ef.alphas[0] - 1.5) <= 1e-12
    assert abs(ef.lam1 - (1 + r)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 9))
def test_roots_agree_with_numpy_roots(n):
    ef = euler_frobenius(n)
    allr = np.roots(ef.gram[::-1])
    inside = np.sort(-allr.real[(np.abs(allr.imag) < 1e-6) & (allr.real > -1) & (allr.real < 0)])
    assert inside.size == n
    assert np.max(np.abs(inside - ef.roots)) <= 1e-9
    # Newton-refined roots are zeros of the Gram polynomial to rounding
    assert np.max(np.abs(np.polynomial.polynomial.polyval(-ef.roots, ef.gram))) <= 1e-13


@pytest.mark.parametrize("n", range(1, 7))
def test_gram_entries_are_inner_products(n):
    ef = euler_frobenius(n)
    for k in range(-n, n + 1):
        assert abs(ef.gram[k + n] - pp_inner(bspline(n), bspline(n, k))) <= 1e-14


@pytest.mark.parametrize("n", range(1, 7))
def test_periodized_sum_matches_gram_symbol(n):
    w = np.linspace(0.05, 2 * math.pi - 0.05, 50)
    assert np.max(np.abs(periodized_symbol(n, w) - gram_symbol(n, w))) <= 1e-8


@pytest.mark.parametrize("n", range(1, 7))
def test_lambda_identity_and_leading_coefficient(n):
    ef = euler_frobenius(n)
    theta = np.linspace(0, math.pi, 37)
    series = sum((-1) ** j * ef.lambdas[j] * np.cos(j * theta) for j in range(n + 1))
    for mask in ([False] * n, [True] * n, [j % 2 == 0 for j in range(n)]):
        t = np.where(mask, 1 / ef.roots, ef.roots)
        prod = np.prod(np.abs(1 - np.exp(1j * theta)[:, None] * t[None, :]) ** 2, axis=1)
        assert np.max(np.abs(prod - np.prod(t) * series) / prod.max()) <= 1e-12
    assert abs(ef.lambdas[-1] - 2.0) <= 1e-12


def test_lambda_does_not_depend_on_tmask():
    a = euler_frobenius(3)
    b = euler_frobenius(3, [True, False, True])
    assert np.array_equal(a.lambdas, b.lambdas)
    assert b.c_inv == 2


def test_lambda_coeffs_of_empty_root_set():
    assert np.array_equal(lambda_coeffs([]), [1.0])


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("k", [0, 2, -1])
def test_scaling_support(n, k):
    assert localized_scaling(euler_frobenius(n), k).support == (k, k + n + 1)
    # reciprocal roots shift the support by their count
    ef = euler_frobenius(n, [True] + [False] * (n - 1))
    assert localized_scaling(ef, k).support == (k + 1, k + n + 2)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("kk", [0, 1])
def test_wavelet_support_of_the_construction(n, m, kk):
    psi = localized_wavelet(euler_frobenius(n), m, kk, 0, 1)
    assert psi.support == (1 - n - m * kk, 1 + n + 1 + m * kk)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("m, kk", [(1, 0), (1, 1), (2, 1), (4, 1)])
def test_vanishing_moments(n, m, kk):
    b = localized_basis(n, 0, 0, m, kk)
    norm = math.sqrt(pp_inner(b.Psi, b.Psi))
    for j in range(n + 1):
        assert abs(pp_moment(b.Psi, j, 0.5)) / norm <= 1e-11


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("m, kk", [(1, 0), (2, 1), (3, 1)])
def test_wavelet_orthogonal_to_scaling_shifts(n, m, kk):
    b = localized_basis(n, 0, 0, m, kk)
    lo, hi = b.Psi.support
    for t in range(int(lo) - n - 2, int(hi) + 2):
        assert abs(pp_inner(b.PhiTilde.shifted(t), b.PsiTilde)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 5))
def test_half_integer_shifts_are_accepted_together(n):
    b = localized_basis(n, 0.5, 1.5)
    assert b.Phi.support == (0.5, n + 1.5)
    for t in range(-n - 4, n + 6):
        assert abs(pp_inner(b.PhiTilde.shifted(t), b.PsiTilde)) <= 1e-12


def test_parity_errors():
    with pytest.raises(ParityError):
        localized_basis(2, 0, 0.5)
    with pytest.raises(ParityError):
        localized_basis(2, 0.3, 0)
    with pytest.raises(ParityError):
        tensor_basis([localized_basis(2, 0, 0), localized_basis(2, 0.5, 0.5)])


def test_bad_orders():
    with pytest.raises(ValueError):
        euler_frobenius(0)
    with pytest.raises(ValueError):
        euler_frobenius(9)
    with pytest.raises(ValueError):
        euler_frobenius(2, [True])
    with pytest.raises(ValueError):
        aux_coefficients(0)


@pytest.mark.parametrize("m", range(1, 6))
def test_aux_filter_symbol(m):
    a = aux_coefficients(m)
    r = np.array(euler_frobenius(m).roots) if m <= 8 else None
    w = np.linspace(0, 2 * math.pi, 17)
    sym = np.real(sum(c * np.exp(1j * (j - m) * w) for j, c in enumerate(a)))
    ref = np.prod(np.abs(1 - np.exp(1j * w)[:, None] * (r**2)[None, :]) ** 2, axis=1)
    assert np.max(np.abs(sym - ref)) <= 1e-12
    assert np.allclose(a, a[::-1], atol=0)


def test_normalization_constants():
    b = localized_basis(2, 0, 0, 2, 1)
    ef = b.ef
    aux = np.array(euler_frobenius(2).roots)
    want = np.prod((1 + ef.roots) * (1 - ef.roots**2)) * np.prod(1 - aux**2) ** 2
    assert abs(b.lam2 - want) <= 1e-14
    assert np.allclose(b.PhiTilde.coeffs, b.Phi.coeffs / ef.lam1, rtol=1e-15)


def test_tensor_supports_and_amplitude():
    b = localized_basis(2)
    B = tensor_basis([b, b])
    assert len(B.genders) == 4
    f = B.function(1, 1, (0, 0))
    (lo, hi) = b.PsiTilde.support
    assert f.support() == [(lo / 2, hi / 2)] * 2
    g = B.function(1, 0, (0, 0))
    # L2 norm is preserved by the 2^{dN/2} factor
    assert abs(f.inner(f) - g.inner(g)) <= 1e-12 * g.inner(g)
    with pytest.raises(ValueError):
        B.function(0, 1, (0, 0))


def test_translations_cover_box_exactly():
    b = localized_basis(1)
    B = tensor_basis([b])
    box = [(0.0, 1.0)]
    lo, hi = b.PsiTilde.support
    taus = [t[0] for t in B.translations(1, 2, box)]
    for t in range(min(taus) - 3, max(taus) + 4):
        meets = (lo + t) / 4 < 1.0 and (hi + t) / 4 > 0.0
        assert meets == (t in taus)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(-3, 3), st.integers(-3, 3))
def test_wavelet_shift_equivariance(n, s, t):
    ef = euler_frobenius(n)
    a = localized_wavelet(ef, 1, 0, 0, s)
    b = localized_wavelet(ef, 1, 0, 0, s + t)
    x = np.linspace(-8, 8, 129)
    assert np.max(np.abs(a(x) - b(x + t))) <= 1e-12 * np.max(np.abs(a.coeffs))


def test_to_dict_round_values():
    d = euler_frobenius(2).to_dict()
    assert d["order"] == 2 and d["tmask"] == ["r", "r"] and len(d["roots"]) == 2
