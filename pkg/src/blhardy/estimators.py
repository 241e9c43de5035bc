"""scikit-learn style wrappers around the functional API.

The wrappers hold configuration as constructor parameters, do the expensive
setup in ``fit`` and expose fitted state through trailing-underscore
attributes.  ``X`` is a list of functions (piecewise polynomials or
separable products) rather than a numeric matrix.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .hardy_ops import OperatorSpec, hardy_C
from .spaces import SpaceParams, analyze, b_norm, check_order, f_norm
from .wavelet_construct import localized_basis, tensor_basis
from .weights import parse_weight

__all__ = ["BesovNormEstimator", "HardyConstantEstimator", "WaveletCoefficientTransformer"]


def _support_box(X, N: int) -> list[tuple[float, float]]:
    from .spaces import as_separable

    lo, hi = [np.inf] * N, [-np.inf] * N
    for f in X:
        for axis, (a, b) in enumerate(as_separable(f).support()):
            lo[axis], hi[axis] = min(lo[axis], a), max(hi[axis], b)
    return [(float(a), float(b)) for a, b in zip(lo, hi)]


class WaveletCoefficientTransformer(TransformerMixin, BaseEstimator):
    """Map functions to their wavelet coefficients on a fixed index layout.

    ``fit`` builds the basis and fixes the index box from the union of the
    supports in ``X``; ``transform`` returns one row per function with the
    coefficients in depth-major order.
    """

    def __init__(self, order: int = 3, depth: int = 4, N: int = 1, m: int = 1, kk: int = 0,
                 box: Optional[list] = None):
        self.order = order
        self.depth = depth
        self.N = N
        self.m = m
        self.kk = kk
        self.box = box

    def fit(self, X, y=None):
        b = localized_basis(self.order, 0, 0, self.m, self.kk)
        self.basis_ = tensor_basis([b] * self.N)
        self.box_ = [tuple(v) for v in self.box] if self.box is not None else _support_box(X, self.N)
        probe = analyze(_zero_like(self.N, self.box_), self.basis_, self.depth, self.box_)
        self.layout_ = [(key, probe.blocks[key][0], probe.blocks[key][1].shape) for key in probe.keys()]
        self.n_features_out_ = int(sum(np.prod(shape) for _, _, shape in self.layout_))
        return self

    def transform(self, X):
        check_is_fitted(self, "layout_")
        rows = []
        for f in X:
            lam = analyze(f, self.basis_, self.depth, self.box_)
            rows.append(np.concatenate([lam.blocks[key][1].ravel() for key, _, _ in self.layout_]))
        return np.vstack(rows) if rows else np.empty((0, self.n_features_out_))

    def coefficients(self, f):
        """Full :class:`SequenceCoeffs` for one function."""
        check_is_fitted(self, "layout_")
        return analyze(f, self.basis_, self.depth, self.box_)


def _zero_like(N: int, box):
    from .splinecore import PiecewisePoly
    from .wavelet_construct import SeparableFunction

    # zero-valued pieces spanning the box keep the full index layout
    factors = [PiecewisePoly.constant(0.0, a, b) for a, b in box]
    return SeparableFunction.product(factors)


class BesovNormEstimator(BaseEstimator):
    """Weighted Besov (``scale='b'``) or Triebel-Lizorkin (``'f'``) norms via wavelet coefficients."""

    def __init__(self, p: float = 2.0, q: float = 2.0, s: float = 0.0, N: int = 1, weight: str = "const",
                 order: int = 3, depth: int = 4, scale: str = "b", r0: float = 1.0):
        self.p = p
        self.q = q
        self.s = s
        self.N = N
        self.weight = weight
        self.order = order
        self.depth = depth
        self.scale = scale
        self.r0 = r0

    def fit(self, X=None, y=None):
        self.params_ = SpaceParams(self.p, self.q, self.s, self.N, parse_weight(self.weight, self.N))
        check_order(self.order, self.params_, self.r0, self.scale)
        b = localized_basis(self.order)
        self.basis_ = tensor_basis([b] * self.N)
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        norm = b_norm if self.scale == "b" else f_norm
        return np.array([norm(analyze(f, self.basis_, self.depth), self.params_) for f in X])


class HardyConstantEstimator(BaseEstimator):
    """Discrete Hardy constants ``M(d)``, ``N(d+1)`` and ``C`` for an operator configuration."""

    def __init__(self, star=("+",), orders=(1,), cuts=(0.0,), w: str = "const", u: Optional[str] = None,
                 p: float = 2.0, depth: int = 4, R: int = 16):
        self.star = star
        self.orders = orders
        self.cuts = cuts
        self.w = w
        self.u = u
        self.p = p
        self.depth = depth
        self.R = R

    def fit(self, X=None, y=None):
        spec = OperatorSpec(tuple(self.star), tuple(self.orders), tuple(self.cuts))
        w = parse_weight(self.w, spec.N)
        u = parse_weight(self.u, spec.N) if self.u is not None else w
        rep = hardy_C(spec, w, u, self.p, self.depth, self.R)
        self.report_ = rep
        self.M_ = {k: v.copy() for k, v in rep.M.items()}
        self.N_ = {k: v.copy() for k, v in rep.N.items()}
        self.C_ = rep.C
        self.inconclusive_ = rep.inconclusive
        return self
