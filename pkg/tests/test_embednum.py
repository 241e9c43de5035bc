import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blhardy.embednum import (
    DiagonalModel,
    NonHilbertError,
    approximation_numbers,
    embedding_diagonal,
    factorization_check,
    index_set,
    rank_k_bruteforce,
)
from blhardy.spaces import SpaceParams
from blhardy.weights import parse_weight


def space(s, weight="const", N=1, p=2.0, q=2.0):
    return SpaceParams(p, q, s, N, parse_weight(weight, N))


@pytest.mark.parametrize("N, D, box, count", [
    (1, 0, [(0, 2)], 2),
    (1, 2, [(0, 2)], 2 + 4 + 8),
    (2, 1, [(0, 1), (0, 1)], 1 + 3 * 4),
    (1, 1, [(-0.5, 0.5)], 1 + 2),
])
def test_index_set_size(N, D, box, count):
    idx = index_set(N, D, box)
    assert len(idx) == count and len(set(idx)) == count
    assert [d for _, d, _ in idx] == sorted(d for _, d, _ in idx)


@pytest.mark.parametrize("s1, s2", [(1.0, 0.5), (2.0, 0.0), (0.5, 0.5)])
def test_unweighted_multipliers_depend_on_depth_only(s1, s2):
    model = embedding_diagonal(space(s1), space(s2), 3, [(0, 2)])
    for (i, d, tau), sig in zip(model.indices, model.multipliers):
        assert abs(sig - 2.0 ** (-d * (s1 - s2))) <= 1e-14


def test_weighted_multiplier_closed_form():
    v, w = "power:alpha=0.5", "power:alpha=1.5"
    model = embedding_diagonal(space(1.0, v), space(0.5, w), 2, [(0, 2)])
    for (i, d, (t,)), sig in zip(model.indices, model.multipliers):
        a, b = (t - 0.5) / 2**d, (t + 0.5) / 2**d
        # power weights are |x|^alpha; masses integrate piecewise around 0
        mass = lambda al: (abs(b) ** (al + 1) * math.copysign(1, b) - abs(a) ** (al + 1) * math.copysign(1, a)) / (al + 1)
        want = 2.0 ** (-0.5 * d) * math.sqrt(mass(1.5) / mass(0.5))
        assert abs(sig - want) <= 1e-12 * want


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=12))
def test_approximation_numbers_are_singular_values(sig):
    model = DiagonalModel(tuple(range(len(sig))), np.array(sig))
    a = approximation_numbers(model).a
    svd = np.linalg.svd(np.diag(sig), compute_uv=False)
    assert np.allclose(a, svd, rtol=0, atol=1e-12)
    assert np.all(np.diff(a) <= 0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=8), st.integers(0, 8))
def test_rank_k_residual_matches_next_number(sig, k):
    a = approximation_numbers(DiagonalModel(tuple(range(len(sig))), np.array(sig))).a
    want = a[k] if k < len(sig) else 0.0
    assert rank_k_bruteforce(sig, k) == want


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_multiplier_bound(seed):
    rng = np.random.default_rng(seed)
    sig, rho = rng.random(10), rng.uniform(-2, 2, 10)
    base = DiagonalModel(tuple(range(10)), sig)
    scaled = base.times(np.abs(rho))
    assert np.all(approximation_numbers(scaled).a <= np.abs(rho).max() * approximation_numbers(base).a + 1e-15)


def test_factorization_check():
    idm = embedding_diagonal(space(1.0), space(0.0), 3, [(0, 2)])
    rho = np.linspace(0.5, 1.5, len(idm))
    rep = factorization_check(idm.times(rho), idm, R_norm=1.5)
    assert rep.ok and abs(rep.Rstar_norm - 2.0) <= 1e-12
    bad = factorization_check(idm.times(rho), idm, R_norm=1.0)
    assert not bad.ok and bad.violation > 0
    zero = factorization_check(idm.times(np.zeros(len(idm))), idm, R_norm=0.0)
    assert zero.to_dict()["Rstar_norm"] == "inf"


def test_errors():
    with pytest.raises(NonHilbertError):
        embedding_diagonal(space(1.0, p=3.0), space(0.0), 1, [(0, 1)])
    with pytest.raises(ValueError):
        embedding_diagonal(space(1.0), space(0.0, N=2), 1, [(0, 1)])
    with pytest.raises(ValueError):
        DiagonalModel((0, 1), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        approximation_numbers(DiagonalModel((0,), np.array([1.0])), K=2)
    with pytest.raises(ValueError):
        rank_k_bruteforce(np.ones(13), 1)


def test_model_is_immutable():
    model = DiagonalModel((0, 1), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        model.multipliers[0] = 5.0
