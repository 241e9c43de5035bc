"""Battle-Lemarie spectral data and compactly supported spline wavelets.

The localized scaling function is a scaled, shifted B-spline and the
localized wavelet is a finite combination of half-integer shifts of
``B_{2n+1}^{(n+1)}`` evaluated at ``2x``.  Both are stored exactly as
:class:`~blhardy.splinecore.PiecewisePoly`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Optional, Sequence

import numpy as np

from .splinecore import (
    PiecewisePoly,
    _bspline_table,
    bspline,
    bspline_fourier,
    pp_combine,
    pp_eval,
    pp_inner,
)

__all__ = [
    "EulerFrobeniusData",
    "LocalizedBasis1D",
    "ParityError",
    "RootCountError",
    "SeparableFunction",
    "TensorBasis",
    "bspline_derivative_combo",
    "euler_frobenius",
    "gram_symbol",
    "lambda_coeffs",
    "localized_basis",
    "localized_scaling",
    "localized_wavelet",
    "normalized_pair",
    "periodized_symbol",
    "aux_coefficients",
    "tensor_basis",
]

MAX_EF_ORDER = 8
MAX_AUX_ORDER = 12
NEWTON_STEPS = 5


class RootCountError(RuntimeError):
    """The companion eigenvalues did not yield exactly ``n`` roots in (-1, 0)."""


class ParityError(ValueError):
    """Shifts mixing integer and half-integer values."""


def _half_int(v: float, name: str) -> float:
    v = float(v)
    if not (2 * v).is_integer():
        raise ParityError(f"{name}={v} is neither an integer nor a half-integer")
    return v


def _is_int(v: float) -> bool:
    return float(v).is_integer()


def _sign(k: float) -> float:
    """``(-1)**k`` with half-integers mapped through ``floor``."""
    return -1.0 if math.floor(k) % 2 else 1.0


# ---------------------------------------------------------------------------
# spectral data


def _gram(n: int) -> np.ndarray:
    """``B_{2n+1}(n + 1 + k)`` for ``k = -n..n``; uses the exact piece table."""
    table = _bspline_table(2 * n + 1)
    # value at integer j is the constant term of piece j
    return np.array([table[n + 1 + k, 0] for k in range(-n, n + 1)])


@lru_cache(maxsize=None)
def _roots(n: int) -> tuple[float, ...]:
    g = _gram(n)
    # z^n * sum g_k z^k, coefficients of z^0..z^{2n}
    poly = np.polynomial.Polynomial(g)
    eig = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(g))
    mask = (np.abs(eig.imag) < 1e-8) & (eig.real < 0) & (eig.real > -1)
    z = np.sort(eig.real[mask])[::-1]  # closest to zero first -> r ascending
    if z.size != n:
        raise RootCountError(f"expected {n} roots in (-1, 0), found {z.size}")
    dpoly = poly.deriv()
    for _ in range(NEWTON_STEPS):
        step = poly(z) / dpoly(z)
        z = z - step
    r = np.sort(-z)
    if np.any((r <= 0) | (r >= 1)):
        raise RootCountError("refined roots left (0, 1)")
    return tuple(float(v) for v in r)


def gram_symbol(n: int, omega) -> np.ndarray:
    """``sum_k g_k e^{i k omega}``, real by symmetry."""
    g = _gram(n)
    k = np.arange(-n, n + 1)
    omega = np.asarray(omega, dtype=float)
    return np.cos(np.multiply.outer(omega, k)) @ g


def periodized_symbol(n: int, omega, terms: int = 200) -> np.ndarray:
    """``2 pi sum_{|m| <= terms} |B_n^(omega + 2 pi m)|^2``."""
    omega = np.asarray(omega, dtype=float)
    m = np.arange(-terms, terms + 1)
    shifted = omega[..., None] + 2 * np.pi * m
    vals = np.abs(bspline_fourier(n, shifted)) ** 2
    return 2 * np.pi * vals.sum(axis=-1)


def _laurent_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def aux_coefficients(m: int) -> np.ndarray:
    """Coefficients ``a_{-m..m}`` of ``prod_j |1 - e^{i w} r_j(m)^2|^2``."""
    if m < 1 or m > MAX_AUX_ORDER:
        raise ValueError(f"auxiliary order must be in 1..{MAX_AUX_ORDER}")
    out = np.array([1.0])
    for r in _roots(m):
        q = r * r
        out = _laurent_mul(out, np.array([-q, 1.0 + q * q, -q]))
    return out


@dataclass(frozen=True)
class EulerFrobeniusData:
    """Order-``n`` spectral data of the B-spline Gram symbol.

    ``tmask[j]`` selects ``t_j = 1/r_j`` when true and ``t_j = r_j`` otherwise.
    """

    n: int
    gram: np.ndarray
    roots: np.ndarray
    alphas: np.ndarray
    beta: float
    gamma: float
    lambdas: np.ndarray
    lam1: float
    tmask: tuple[bool, ...]

    @property
    def c_inv(self) -> int:
        """Number of indices using ``1/r_j``."""
        return int(sum(self.tmask))

    @property
    def t(self) -> np.ndarray:
        return np.where(np.array(self.tmask, dtype=bool), 1.0 / self.roots, self.roots)

    def lam2(self, m: int = 1, kk: int = 0) -> float:
        """``prod (1 + r_j)(1 - r_j^2)`` times ``[prod (1 - r_j(m)^2)]^{2 kk}``."""
        base = float(np.prod((1.0 + self.roots) * (1.0 - self.roots**2)))
        if kk:
            aux = np.array(_roots(m))
            base *= float(np.prod(1.0 - aux**2)) ** (2 * kk)
        return base

    def to_dict(self) -> dict:
        return {
            "order": self.n,
            "gram": self.gram.tolist(),
            "roots": self.roots.tolist(),
            "alphas": self.alphas.tolist(),
            "beta": self.beta,
            "gamma": self.gamma,
            "lambdas": self.lambdas.tolist(),
            "lam1": self.lam1,
            "tmask": ["1/r" if b else "r" for b in self.tmask],
        }


def lambda_coeffs(roots: Sequence[float]) -> np.ndarray:
    """``lambda_0..lambda_n`` with ``prod |1 - e^{i theta} t_j|^2 = (prod t_j) sum (-1)^j lambda_j cos(j theta)``.

    Only ``rho_j = r_j + 1/r_j`` enters, so the result is the same for either
    choice of ``t_j``.
    """
    roots = np.asarray(roots, dtype=float)
    # prod_j (rho_j - 2 c) as a polynomial in c = cos(theta)
    p = np.array([1.0])
    for r in roots:
        p = np.polynomial.polynomial.polymul(p, [r + 1.0 / r, -2.0])
    cheb = np.polynomial.chebyshev.poly2cheb(p)
    signs = (-1.0) ** np.arange(cheb.size)
    lam = signs * cheb
    if roots.size and abs(lam[-1] - 2.0) > 1e-12:
        raise ArithmeticError(f"leading cosine coefficient {lam[-1]} != 2")
    return lam


def euler_frobenius(n: int, tmask: Optional[Sequence[bool]] = None) -> EulerFrobeniusData:
    """Gram coefficients, roots and derived constants of order ``n`` (1..8)."""
    n = int(n)
    if not 1 <= n <= MAX_EF_ORDER:
        raise ValueError(f"order must be in 1..{MAX_EF_ORDER}")
    tmask = tuple(bool(b) for b in (tmask if tmask is not None else [False] * n))
    if len(tmask) != n:
        raise ValueError(f"tmask needs {n} entries")
    gram = _gram(n)
    roots = np.array(_roots(n))
    alphas = (1.0 + roots) ** 2 / (4.0 * roots)
    ar = math.sqrt(float(np.prod(alphas * roots)))
    lam = lambda_coeffs(roots)
    out = EulerFrobeniusData(
        n=n,
        gram=gram,
        roots=roots,
        alphas=alphas,
        beta=2.0**n * ar,
        gamma=float(np.prod(roots)) * ar,
        lambdas=lam,
        lam1=float(np.prod(1.0 + roots)),
        tmask=tmask,
    )
    for arr in (gram, roots, alphas, lam):
        arr.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# localized functions


@lru_cache(maxsize=None)
def bspline_derivative_combo(n: int) -> PiecewisePoly:
    """``B_{2n+1}^{(n+1)} = sum_v (-1)^v C(n+1, v) B_n(. - v)``."""
    return pp_combine(
        [((-1.0) ** v * math.comb(n + 1, v), bspline(n), 1, v) for v in range(n + 2)]
    )


def localized_scaling(ef: EulerFrobeniusData, k: float = 0) -> PiecewisePoly:
    """``beta_n B_n(. - k - c)`` where ``c`` counts the reciprocal roots."""
    k = _half_int(k, "k")
    return ef.beta * bspline(ef.n, k + ef.c_inv)


def localized_wavelet(
    ef: EulerFrobeniusData, m: int = 1, kk: int = 0, k: float = 0, s: float = 0
) -> PiecewisePoly:
    """Compactly supported wavelet of order ``n`` with shift ``s``.

    Supported on ``[s - n - m kk, s + n + 1 + m kk]``.  With ``kk = 1`` the
    ``kk = 0`` wavelet is smoothed by the symmetric integer-shift filter
    :func:`aux_coefficients` of order ``m``.
    """
    k = _half_int(k, "k")
    s = _half_int(s, "s")
    if _is_int(k) != _is_int(s):
        raise ParityError("k and s must both be integers or both half-integers")
    if kk not in (0, 1):
        raise ValueError("kk must be 0 or 1")
    if kk == 1 and m < 1:
        raise ValueError("m must be >= 1 when kk = 1")
    n = ef.n
    d = bspline_derivative_combo(n)
    filt = aux_coefficients(m) if kk else np.array([1.0])
    half = (filt.size - 1) // 2
    lead = ef.gamma * _sign(n + 1 + k + ef.c_inv) / 2.0
    terms = []
    # D(2(x - s - l) + n +- j) = D(2x - (2 s + 2 l - n -+ j))
    for li, a in enumerate(filt):
        l = li - half
        for j in range(n + 1):
            c = lead * a * ef.lambdas[j] / (2.0 * (-1.0) ** j)
            terms.append((c, d, 2, 2 * (s + l) - n - j))
            terms.append((c, d, 2, 2 * (s + l) - n + j))
    return pp_combine(terms)


@dataclass(frozen=True)
class LocalizedBasis1D:
    ef: EulerFrobeniusData
    k: float
    s: float
    m: int
    kk: int
    Phi: PiecewisePoly
    Psi: PiecewisePoly
    PhiTilde: PiecewisePoly
    PsiTilde: PiecewisePoly

    @property
    def n(self) -> int:
        return self.ef.n

    @property
    def lam2(self) -> float:
        return self.ef.lam2(self.m, self.kk)


def normalized_pair(
    ef: EulerFrobeniusData, Phi: PiecewisePoly, Psi: PiecewisePoly, k: float, m: int = 1, kk: int = 0
) -> tuple[PiecewisePoly, PiecewisePoly]:
    """``Phi / Lambda'`` and ``(-1)^{k+c} Psi / Lambda''``."""
    phi_t = (1.0 / ef.lam1) * Phi
    psi_t = (_sign(k + ef.c_inv) / ef.lam2(m, kk)) * Psi
    return phi_t, psi_t


def localized_basis(
    n: int,
    k: float = 0,
    s: float = 0,
    m: int = 1,
    kk: int = 0,
    tmask: Optional[Sequence[bool]] = None,
) -> LocalizedBasis1D:
    ef = euler_frobenius(n, tmask)
    phi = localized_scaling(ef, k)
    psi = localized_wavelet(ef, m, kk, k, s)
    phi_t, psi_t = normalized_pair(ef, phi, psi, k, m, kk)
    return LocalizedBasis1D(ef, float(k), float(s), int(m), int(kk), phi, psi, phi_t, psi_t)


# ---------------------------------------------------------------------------
# tensor products


def _dilate(f: PiecewisePoly, d: int, tau: float) -> PiecewisePoly:
    """``f(2^d x - tau)`` without amplitude factor."""
    if d == 0:
        return f.shifted(tau)
    return pp_combine([(1.0, f, 2.0**d, tau)])


@dataclass(frozen=True)
class SeparableFunction:
    """Finite sum ``sum_t c_t prod_l f_{t,l}(x_l)`` of per-axis piecewise polynomials."""

    terms: tuple[tuple[float, tuple[PiecewisePoly, ...]], ...]

    @classmethod
    def product(cls, factors: Sequence[PiecewisePoly], coef: float = 1.0) -> "SeparableFunction":
        return cls(((float(coef), tuple(factors)),))

    @property
    def dim(self) -> int:
        return len(self.terms[0][1]) if self.terms else 0

    def __call__(self, *xs):
        xs = [np.asarray(x, dtype=float) for x in xs]
        out = 0.0
        for c, fs in self.terms:
            v = c
            for f, x in zip(fs, xs):
                v = v * pp_eval(f, x)
            out = out + v
        return out

    def __add__(self, other: "SeparableFunction") -> "SeparableFunction":
        return SeparableFunction(self.terms + other.terms)

    def scaled(self, c: float) -> "SeparableFunction":
        return SeparableFunction(tuple((c * a, fs) for a, fs in self.terms))

    def support(self) -> list[tuple[float, float]]:
        out = []
        for axis in range(self.dim):
            lo = min(fs[axis].support[0] for _, fs in self.terms)
            hi = max(fs[axis].support[1] for _, fs in self.terms)
            out.append((lo, hi))
        return out

    def inner(self, other: "SeparableFunction", weights=None) -> float:
        """``int self * other * prod_l w_l(x_l)``, factorized per axis.

        Terms are accumulated in their stored order so the result does not
        depend on how callers schedule work.
        """
        total = 0.0
        for a, fs in self.terms:
            for b, gs in other.terms:
                v = a * b
                for axis, (f, g) in enumerate(zip(fs, gs)):
                    w = None if weights is None else weights[axis]
                    v *= pp_inner(f, g, w)
                    if v == 0.0:
                        break
                total += v
        return total


@dataclass(frozen=True)
class TensorBasis:
    """Separable wavelet family ``Psi_{i d tau}(x) = 2^{dN/2} Psi_i(2^d x - tau)``.

    Gender 0 is the all-scaling product.  For ``N = 2`` genders 1, 2, 3 are
    (wavelet, wavelet), (wavelet, scaling) and (scaling, wavelet).  The
    normalized pair of each axis is used.
    """

    axes: tuple[LocalizedBasis1D, ...]

    @property
    def N(self) -> int:
        return len(self.axes)

    @property
    def genders(self) -> tuple[tuple[bool, ...], ...]:
        """Per-gender flags, ``True`` meaning the wavelet factor on that axis."""
        if self.N == 1:
            return ((False,), (True,))
        return ((False, False), (True, True), (True, False), (False, True))

    def generator(self, i: int) -> tuple[PiecewisePoly, ...]:
        flags = self.genders[i]
        return tuple(ax.PsiTilde if f else ax.PhiTilde for ax, f in zip(self.axes, flags))

    def function(self, i: int, d: int, tau: Sequence[float]) -> SeparableFunction:
        if i == 0 and d != 0:
            raise ValueError("scaling functions are only used at depth 0")
        tau = tuple(float(t) for t in np.atleast_1d(tau))
        if len(tau) != self.N:
            raise ValueError(f"translation needs {self.N} components")
        factors = tuple(_dilate(g, d, t) for g, t in zip(self.generator(i), tau))
        return SeparableFunction.product(factors, 2.0 ** (d * self.N / 2.0))

    def supports(self, i: int) -> list[tuple[float, float]]:
        return [g.support for g in self.generator(i)]

    def translations(self, i: int, d: int, box: Sequence[tuple[float, float]]) -> Iterator[tuple[int, ...]]:
        """Integer translations whose function meets the axis-aligned ``box``."""
        ranges = []
        for (lo, hi), (a, b) in zip(box, self.supports(i)):
            # support of g(2^d x - t) is [(a + t)/2^d, (b + t)/2^d]
            t_min = math.floor(lo * 2.0**d - b) + 1
            t_max = math.ceil(hi * 2.0**d - a) - 1
            ranges.append(range(t_min, t_max + 1))
        yield from product(*ranges)


def tensor_basis(axes: Sequence[LocalizedBasis1D]) -> TensorBasis:
    axes = tuple(axes)
    if len(axes) not in (1, 2):
        raise ValueError("only N = 1 or N = 2 is supported")
    parity = {_is_int(ax.k) for ax in axes}
    if len(parity) != 1:
        raise ParityError("all axes must share integer or half-integer shifts")
    return TensorBasis(axes)
