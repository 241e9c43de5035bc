import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from blhardy.spaces import (
    MollifierSpec,
    MomentDeficiencyError,
    OrderTooLowError,
    SequenceCoeffs,
    SpaceParams,
    analyze,
    b_norm,
    besov_norm_via_wavelets,
    check_order,
    f_norm,
    lp_besov_norm,
    required_order,
    single_entry_norm,
)
from blhardy.splinecore import PiecewisePoly, bspline, pp_combine, pp_inner
from blhardy.wavelet_construct import SeparableFunction, localized_basis, tensor_basis
from blhardy.weights import parse_weight


@pytest.fixture(scope="module")
def basis1():
    return tensor_basis([localized_basis(3)])


@pytest.fixture(scope="module")
def basis2():
    b = localized_basis(2)
    return tensor_basis([b, b])


def test_scaling_coefficient_of_the_scaling_function(basis1):
    b = basis1.axes[0]
    lam = analyze(b.PhiTilde, basis1, 1)
    ef = b.ef
    want = ef.beta**2 * ef.gram[ef.n] / ef.lam1**2
    assert abs(lam.get(0, 0, (0,)) - want) <= 1e-14


@pytest.mark.parametrize("shift", [0.0, 1.0, -2.0, 0.5])
def test_splines_have_no_level_zero_wavelet_content(basis1, shift):
    # integer-shifted B_n are orthogonal to the wavelet; half-integer shifts are not
    lam = analyze(bspline(3, shift), basis1, 1)
    top = np.max(np.abs(lam.blocks[(1, 1)][1]))
    if float(shift).is_integer():
        assert top <= 1e-13
    else:
        assert top > 1e-6


@pytest.mark.parametrize("i, d, tau", [(1, 1, (0, 0)), (2, 2, (1, -1)), (3, 3, (2, 5)), (0, 0, (-1, 2))])
def test_coefficients_match_direct_pairing(basis2, i, d, tau):
    f = SeparableFunction.product([pp_combine([(1.0, bspline(3), 2, 0.5)]), bspline(2, -1.0)])
    lam = analyze(f, basis2, 3)
    if d == 0:
        want = f.inner(basis2.function(0, 0, tau))
    else:
        want = 2.0 ** (d * 2 / 2) * f.inner(basis2.function(i, d - 1, tau))
    assert abs(lam.get(i, d, tau) - want) <= 1e-13


def test_vanishing_moment_oracle(basis1):
    # cubic polynomial on [-20, 20]; wavelets inside the plateau see nothing
    f = PiecewisePoly.from_polynomial([1.0, -2.0, 0.5, 0.25], -20.0, 20.0)
    lam = analyze(f, basis1, 3)
    lo, hi = basis1.axes[0].PsiTilde.support
    for i, d, tau, v in lam.entries():
        if d == 0:
            continue
        j = d - 1
        a, b = (lo + tau[0]) / 2**j, (hi + tau[0]) / 2**j
        if -20 < a and b < 20:
            assert abs(v) <= 1e-8 * 20**3


def test_callable_input_against_quad(basis1):
    def f(x):
        return np.exp(-((np.asarray(x) - 1.0) ** 2))

    lam = analyze(f, basis1, 2, box=[(-2.0, 4.0)])
    for i, d, tau in [(0, 0, (0,)), (1, 1, (-1,)), (1, 2, (2,))]:
        g = basis1.function(i, max(d - 1, 0), tau)
        scale = 2.0 ** (d / 2) if d else 1.0
        lo, hi = g.support()[0]
        br = sorted(set(np.concatenate([b.breaks for _, (b,) in g.terms]).tolist()))
        ref = sum(integrate.quad(lambda x: f(x) * g(x), a, b, epsabs=1e-15, epsrel=1e-13)[0] for a, b in zip(br[:-1], br[1:]))
        assert abs(lam.get(i, d, tau) - scale * ref) <= 1e-12


def test_truncation_flag(basis1):
    f = bspline(3)
    assert analyze(f, basis1, 1, box=[(-0.5, 4.5)]).truncated
    assert not analyze(f, basis1, 1, box=[(-20.0, 24.0)]).truncated


def test_threads_do_not_change_coefficients(basis2):
    f = SeparableFunction.product([bspline(3), bspline(2, 0.5)])
    a, b = analyze(f, basis2, 3, threads=1), analyze(f, basis2, 3, threads=6)
    assert a.keys() == b.keys()
    for k in a.keys():
        assert np.array_equal(a.blocks[k][1], b.blocks[k][1])


# ---------------------------------------------------------------------------
# sequence norms


def random_coeffs(rng, N, D):
    out = SequenceCoeffs(N=N, D=D)
    for d in range(D + 1):
        for i in ([0] if d == 0 else range(1, 2**N)):
            shape = tuple(int(v) for v in rng.integers(1, 5, size=N))
            off = tuple(int(v) for v in rng.integers(-4, 3, size=N))
            out.set_block(i, d, off, rng.normal(size=shape))
    return out


def f_norm_oracle(lam, P, refine=3):
    """Midpoint rule on cells of width 2^-(D+1+refine); exact because the density is cellwise constant."""
    N, p, q, s = P.N, P.p, P.q, P.s
    D = lam.D
    h = 2.0 ** -(D + 1 + refine)
    x = np.arange(-12.0, 12.0, h) + h / 2
    mass = np.array([P.weight.axes[0].integral(t - h / 2, t + h / 2) for t in x])
    dens = np.zeros_like(x)
    head = 0.0
    for i, d, tau, v in lam.entries():
        if d == 0:
            head += abs(v) ** p * P.weight.axes[0].integral(tau[0] - 0.5, tau[0] + 0.5)
            continue
        chi = np.abs(x * 2.0**d - tau[0]) < 0.5
        val = 2.0 ** (d * (s - N / p)) * 2.0 ** (d * N / p) * abs(v)
        dens += chi * (val**q if math.isfinite(q) else 0)
    return head ** (1 / p) + float(np.sum(dens ** (p / q) * mass)) ** (1 / p)


@pytest.mark.parametrize("p, q", [(2.0, 2.0), (1.5, 3.0), (3.0, 1.2)])
@pytest.mark.parametrize("weight", ["const", "power:alpha=0.5,center=0.1"])
def test_f_norm_against_fine_grid_oracle(p, q, weight):
    rng = np.random.default_rng(3)
    lam = random_coeffs(rng, 1, 3)
    P = SpaceParams(p, q, 0.7, 1, parse_weight(weight, 1))
    assert abs(f_norm(lam, P) - f_norm_oracle(lam, P)) <= 1e-12 * f_norm(lam, P)


def test_b_norm_by_hand():
    lam = SequenceCoeffs.from_entries(1, {(0, 0, (0,)): 2.0, (1, 1, (0,)): 1.0, (1, 1, (1,)): -1.0, (1, 2, (3,)): 0.5})
    P = SpaceParams(2.0, 1.0, 1.0, 1)
    head = 2.0
    t1 = 2.0 ** (1 * (1 - 0.5)) * math.sqrt(2 * (1 + 1) * 0.5)
    t2 = 2.0 ** (2 * (1 - 0.5)) * math.sqrt(4 * 0.25 * 0.25)
    assert abs(b_norm(lam, P) - (head + t1 + t2)) <= 1e-14
    Pinf = SpaceParams(2.0, math.inf, 1.0, 1)
    assert abs(b_norm(lam, Pinf) - (head + max(t1, t2))) <= 1e-14


@pytest.mark.parametrize("d, tau", [(1, (0,)), (3, (5,)), (2, (-1, 4))])
def test_single_entry(d, tau):
    N = len(tau)
    P = SpaceParams(2.5, 2.0, 0.3, N, parse_weight("power:alpha=0.5,center=0.1", N))
    lam = SequenceCoeffs.from_entries(N, {(1, d, tau): -3.0})
    assert abs(b_norm(lam, P) - single_entry_norm(d, tau, P, -3.0)) <= 1e-13
    assert abs(f_norm(lam, P) - single_entry_norm(d, tau, P, -3.0)) <= 1e-13


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([1.2, 2.0, 3.5]), st.floats(-1, 2), st.integers(1, 2))
def test_b_equals_f_when_p_equals_q(seed, p, s, N):
    rng = np.random.default_rng(seed)
    lam = random_coeffs(rng, N, 3)
    P = SpaceParams(p, p, s, N, parse_weight("example:alpha=0.4", N))
    b, f = b_norm(lam, P), f_norm(lam, P)
    assert abs(b - f) <= 1e-12 * b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 10))
def test_norms_are_homogeneous(seed, c):
    rng = np.random.default_rng(seed)
    lam = random_coeffs(rng, 1, 3)
    P = SpaceParams(2.0, 1.5, 0.5, 1)
    assert abs(b_norm(lam.scaled(c), P) - c * b_norm(lam, P)) <= 1e-12 * c * b_norm(lam, P)
    assert abs(f_norm(lam.scaled(c), P) - c * f_norm(lam, P)) <= 1e-12 * c * f_norm(lam, P)


def test_to_dict_and_entries_round_trip():
    rng = np.random.default_rng(0)
    lam = random_coeffs(rng, 2, 2)
    back = SequenceCoeffs.from_entries(2, {(i, d, tau): v for i, d, tau, v in lam.entries() if v != 0})
    for i, d, tau, v in lam.entries():
        assert back.get(i, d, tau) == v
    doc = lam.to_dict()
    assert doc["N"] == 2 and len(doc["blocks"]) == len(lam.keys())


def test_gender_depth_rule():
    lam = SequenceCoeffs(N=1, D=0)
    with pytest.raises(ValueError):
        lam.set_block(0, 1, (0,), np.ones(1))
    with pytest.raises(ValueError):
        lam.set_block(1, 0, (0,), np.ones(1))


# ---------------------------------------------------------------------------
# order conditions


def test_required_order_terms():
    n, terms = required_order(SpaceParams(2.0, 2.0, 1.0, 1), r0=1.0)
    assert terms == {"zero": 0, "smoothness": 2, "weight_integrability": 0, "sigma": -1}
    assert n == 3
    n, terms = required_order(SpaceParams(1.5, 2.0, 0.0, 2), r0=2.0)
    # sigma_p = 2(2/1.5 - 1) + 2 = 2.667
    assert terms["sigma"] == 2 and terms["weight_integrability"] == 2 and n == 3


def test_order_too_low_is_rejected(basis1):
    with pytest.raises(OrderTooLowError):
        check_order(1, SpaceParams(2.0, 2.0, 1.5, 1))
    P = SpaceParams(2.0, 2.0, 3.5, 1)
    with pytest.raises(OrderTooLowError):
        besov_norm_via_wavelets(bspline(3), P, basis1, 2)


def test_space_params_validation():
    with pytest.raises(ValueError):
        SpaceParams(1.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        SpaceParams(2.0, 2.0, 0.0, 3)
    with pytest.raises(ValueError):
        SpaceParams(2.0, 2.0, 0.0, 2, parse_weight("const", 1))


# ---------------------------------------------------------------------------
# mollifier norm


def test_bump_has_unit_mass_and_even_shape():
    m = MollifierSpec()
    val, _ = integrate.quad(m.eta, -1, 1, epsabs=0, epsrel=1e-12)
    assert abs(val - 1.0) <= 1e-12
    t = np.linspace(-1, 1, 11)
    assert np.allclose(m.eta(t), m.eta(-t), atol=0)


def test_smoothness_above_moment_order_rejected():
    with pytest.raises(MomentDeficiencyError):
        lp_besov_norm(bspline(3), SpaceParams(2.0, 2.0, 1.5, 1))


def test_mollifier_norm_level_zero_against_quadrature():
    # with D = 0 the norm is the L2 norm of eta * f
    f = bspline(2)
    got = lp_besov_norm(f, SpaceParams(2.0, 2.0, 0.0, 1), D=0)
    m = MollifierSpec()
    conv = lambda x: integrate.quad(lambda y: m.eta(y) * f(x - y), -1, 1, points=[x - 3, x - 2, x - 1, x], limit=200)[0]
    val, _ = integrate.quad(lambda x: conv(x) ** 2, -1, 4, limit=200)
    assert abs(got - math.sqrt(val)) <= 2e-3 * math.sqrt(val)


def test_zero_function_norm_is_zero():
    assert lp_besov_norm(PiecewisePoly.zero(), SpaceParams(2.0, 2.0, 0.0, 1)) == 0.0


def test_wavelet_norm_of_two_dimensional_product(basis2):
    f = SeparableFunction.product([bspline(3), bspline(3)])
    P = SpaceParams(2.0, 2.0, 0.0, 2)
    # s = 0, p = q = 2: the norm is finite and close to the one at the next depth
    a = besov_norm_via_wavelets(f, P, tensor_basis([localized_basis(3)] * 2), 2)
    b = besov_norm_via_wavelets(f, P, tensor_basis([localized_basis(3)] * 2), 3)
    assert math.isfinite(a) and abs(a - b) <= 0.05 * a
