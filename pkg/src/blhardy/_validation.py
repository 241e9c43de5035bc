"""Small argument checks shared by the functional API and the estimators."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np


def check_exponent(p: float, name: str = "p", *, allow_inf: bool = False, lower: float = 1.0, strict: bool = True) -> float:
    if not isinstance(p, Real):
        raise TypeError(f"{name} must be a real number")
    p = float(p)
    if math.isinf(p):
        if allow_inf and p > 0:
            return p
        raise ValueError(f"{name} must be finite")
    if (strict and p <= lower) or (not strict and p < lower):
        op = ">" if strict else ">="
        raise ValueError(f"{name} must be {op} {lower:g}, got {p:g}")
    return p


def check_nonneg_int(v, name: str) -> int:
    if not isinstance(v, (Integral, np.integer)) or v < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
    return int(v)


def check_dim(N) -> int:
    N = check_nonneg_int(N, "N")
    if N not in (1, 2):
        raise ValueError("only N = 1 or N = 2 is supported")
    return N


def dual_exponent(p: float) -> float:
    return math.inf if p == 1.0 else p / (p - 1.0)


def check_finite_array(x, name: str = "x", ndim=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if ndim is not None and x.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x
