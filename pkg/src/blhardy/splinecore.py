"""Exact compactly supported piecewise polynomials and cardinal B-splines.

Every function in the package (B-splines, localized scaling functions and
wavelets, test functions) is stored as a :class:`PiecewisePoly`: a strictly
increasing breakpoint vector and one row of monomial coefficients per piece,
expressed in the local variable ``t = x - left_endpoint``.  Outside the first
and last breakpoint the function is zero, and pieces are half-open
``[b_i, b_{i+1})``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "MAX_ORDER",
    "BREAK_TOL",
    "DegreeError",
    "OrderTooLargeError",
    "PiecewisePoly",
    "bspline",
    "bspline_fourier",
    "gauss_legendre",
    "pp_antiderivative",
    "pp_combine",
    "pp_derivative",
    "pp_eval",
    "pp_inner",
    "pp_moment",
]

MAX_ORDER = 16
BREAK_TOL = 1e-12
NONPOLY_NODES = 32


class OrderTooLargeError(ValueError):
    """Raised when a B-spline order exceeds :data:`MAX_ORDER`."""


class DegreeError(ValueError):
    """Raised when a derivative order exceeds what the degree bound allows."""


@dataclass(frozen=True, eq=False)
class PiecewisePoly:
    """Compactly supported piecewise polynomial on a finite breakpoint grid.

    Parameters
    ----------
    breaks : ndarray of shape (K + 1,)
        Strictly increasing breakpoints.  ``K == 0`` encodes the zero function.
    coeffs : ndarray of shape (K, D + 1)
        ``coeffs[i, k]`` multiplies ``(x - breaks[i]) ** k`` on piece ``i``.
    """

    breaks: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float).reshape(-1)
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs.reshape(-1, 1) if breaks.size > 1 else coeffs.reshape(0, -1)
        if breaks.size == 0:
            breaks = np.zeros(1)
        if coeffs.shape[0] != breaks.size - 1:
            raise ValueError(
                f"need {breaks.size - 1} coefficient rows, got {coeffs.shape[0]}"
            )
        if coeffs.shape[1] == 0:
            coeffs = np.zeros((coeffs.shape[0], 1))
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(breaks)) or not np.all(np.isfinite(coeffs)):
            raise ValueError("breakpoints and coefficients must be finite")
        breaks.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, degree: int = 0) -> "PiecewisePoly":
        return cls(np.zeros(1), np.zeros((0, degree + 1)))

    @classmethod
    def constant(cls, value: float, a: float, b: float) -> "PiecewisePoly":
        """``value`` on ``[a, b)``, zero elsewhere."""
        return cls(np.array([a, b], dtype=float), np.array([[value]], dtype=float))

    @classmethod
    def from_polynomial(cls, poly: Sequence[float], a: float, b: float) -> "PiecewisePoly":
        """Restriction of the global polynomial ``sum poly[k] x**k`` to ``[a, b)``."""
        c = _taylor_shift(np.asarray(poly, dtype=float)[None, :], np.array([a]))
        return cls(np.array([a, b], dtype=float), c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_pieces(self) -> int:
        return self.coeffs.shape[0]

    @property
    def support(self) -> tuple[float, float]:
        if self.n_pieces == 0:
            return (0.0, 0.0)
        return (float(self.breaks[0]), float(self.breaks[-1]))

    def is_zero(self, atol: float = 0.0) -> bool:
        return self.n_pieces == 0 or bool(np.all(np.abs(self.coeffs) <= atol))

    def __call__(self, x):
        return pp_eval(self, x)

    def __neg__(self):
        return PiecewisePoly(self.breaks, -self.coeffs)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return PiecewisePoly(self.breaks, float(c) * self.coeffs)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return pp_combine([(1.0, self, 1.0, 0.0), (1.0, other, 1.0, 0.0)])

    def __sub__(self, other):
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        return pp_combine([(1.0, self, 1.0, 0.0), (-1.0, other, 1.0, 0.0)])

    def shifted(self, h: float) -> "PiecewisePoly":
        """``x -> f(x - h)``; exact, the local coefficients do not change."""
        return PiecewisePoly(self.breaks + h, self.coeffs)

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breaks],
            "pieces": [[float(c) for c in row] for row in self.coeffs],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewisePoly":
        breaks = np.asarray(data["breakpoints"], dtype=float)
        pieces = data["pieces"]
        width = max((len(r) for r in pieces), default=1)
        coeffs = np.zeros((len(pieces), width))
        for i, row in enumerate(pieces):
            coeffs[i, : len(row)] = row
        return cls(breaks, coeffs)

    def __repr__(self):
        a, b = self.support
        return f"PiecewisePoly(support=[{a:g}, {b:g}], pieces={self.n_pieces}, degree={self.degree})"


# ---------------------------------------------------------------------------
# helpers


def _pad(coeffs: np.ndarray, width: int) -> np.ndarray:
    if coeffs.shape[1] >= width:
        return coeffs
    out = np.zeros((coeffs.shape[0], width))
    out[:, : coeffs.shape[1]] = coeffs
    return out


@lru_cache(maxsize=None)
def _binom_table(size: int) -> np.ndarray:
    table = np.zeros((size, size))
    for j in range(size):
        for k in range(j + 1):
            table[j, k] = math.comb(j, k)
    return table


def _taylor_shift(coeffs: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Rows ``p_i(t)`` -> rows of ``p_i(t + h_i)``."""
    width = coeffs.shape[1]
    binom = _binom_table(width)
    out = np.zeros_like(coeffs)
    h = np.asarray(h, dtype=float)
    for j in range(width):
        cj = coeffs[:, j]
        if not np.any(cj):
            continue
        for k in range(j + 1):
            out[:, k] += cj * binom[j, k] * h ** (j - k)
    return out


def _horner(coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        out = out * t + coeffs[..., k]
    return out


def _trim(breaks: np.ndarray, coeffs: np.ndarray) -> PiecewisePoly:
    """Drop identically zero pieces at both ends."""
    nonzero = np.flatnonzero(np.any(coeffs != 0.0, axis=1))
    if nonzero.size == 0:
        return PiecewisePoly.zero(coeffs.shape[1] - 1)
    lo, hi = nonzero[0], nonzero[-1]
    return PiecewisePoly(breaks[lo : hi + 2], coeffs[lo : hi + 1])


def _merge_breaks(arrays: Iterable[np.ndarray]) -> np.ndarray:
    allb = np.concatenate([np.asarray(a, dtype=float) for a in arrays])
    if allb.size == 0:
        return allb
    allb = np.unique(allb)
    keep = np.ones(allb.size, dtype=bool)
    last = allb[0]
    for i in range(1, allb.size):
        if allb[i] - last <= BREAK_TOL * max(1.0, abs(last)):
            keep[i] = False
        else:
            last = allb[i]
    return allb[keep]


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


# ---------------------------------------------------------------------------
# B-splines


@lru_cache(maxsize=None)
def _bspline_table(n: int) -> np.ndarray:
    """Local monomial coefficients of B_n on its unit pieces [j, j+1), j = 0..n.

    Built from ``B_n(x) = x/n B_{n-1}(x) + (n+1-x)/n B_{n-1}(x-1)``.
    """
    table = np.array([[1.0]])
    for order in range(1, n + 1):
        prev = _pad(table, order + 1)  # order pieces, degree order-1 padded
        new = np.zeros((order + 1, order + 1))
        for j in range(order + 1):
            # on [j, j+1): x = j + t
            acc = np.zeros(order + 1)
            if j < order:  # B_{order-1}(x) piece j
                p = prev[j]
                # (j + t)/order * p(t)
                acc[:-1] += j * p[:-1] / order
                acc[1:] += p[:-1] / order
            if j >= 1:  # B_{order-1}(x-1) piece j-1
                p = prev[j - 1]
                # (order + 1 - j - t)/order * p(t)
                acc[:-1] += (order + 1 - j) * p[:-1] / order
                acc[1:] -= p[:-1] / order
            new[j] = acc
        table = new
    table.setflags(write=False)
    return table


def bspline(n: int, shift: float = 0.0) -> PiecewisePoly:
    """Cardinal B-spline ``B_n(x - shift)`` supported on ``[shift, shift + n + 1]``."""
    n = int(n)
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > MAX_ORDER:
        raise OrderTooLargeError(f"order {n} exceeds the cap {MAX_ORDER}")
    if not math.isfinite(shift):
        raise ValueError("shift must be finite")
    breaks = shift + np.arange(n + 2, dtype=float)
    return PiecewisePoly(breaks, _bspline_table(n).copy())


def bspline_fourier(n: int, omega):
    """Fourier transform of ``B_n`` with the ``(2 pi)^{-1/2}`` convention."""
    omega = np.asarray(omega, dtype=float)
    # (1 - e^{-iw}) / (iw) = e^{-iw/2} sin(w/2) / (w/2), stable near w = 0
    half = 0.5 * omega
    out = (np.exp(-1j * half) * np.sinc(half / math.pi)) ** (n + 1) / math.sqrt(2.0 * math.pi)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# evaluation and calculus


def pp_eval(f: PiecewisePoly, x):
    """Evaluate ``f`` with the half-open piece convention; zero off support."""
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1)
    out = np.zeros_like(flat)
    if f.n_pieces:
        idx = np.searchsorted(f.breaks, flat, side="right") - 1
        inside = (idx >= 0) & (idx < f.n_pieces)
        i = idx[inside]
        out[inside] = _horner(f.coeffs[i], flat[inside] - f.breaks[i])
    out = out.reshape(x.shape)
    return out[()] if out.ndim == 0 else out


def pp_derivative(f: PiecewisePoly, k: int = 1) -> PiecewisePoly:
    """Piecewise (almost-everywhere) derivative of order ``k``.

    Orders up to ``degree + 1`` are accepted; the ``(degree+1)``-th derivative
    is the a.e. zero function.
    """
    if k < 1:
        raise ValueError("derivative order must be >= 1")
    if k > f.degree + 1:
        raise DegreeError(f"derivative order {k} exceeds degree bound {f.degree} + 1")
    c = f.coeffs.copy()
    for _ in range(k):
        if c.shape[1] == 1:
            c = np.zeros((c.shape[0], 1))
            continue
        c = c[:, 1:] * np.arange(1, c.shape[1], dtype=float)
    return _trim(f.breaks, c)


def pp_antiderivative(f: PiecewisePoly, start: Optional[float] = None, stop: Optional[float] = None) -> PiecewisePoly:
    """``F(x) = int_start^x f`` restricted to ``[start, stop)``.

    ``start`` defaults to the left end of the support, ``stop`` to the right
    end.  Beyond the support of ``f`` the antiderivative is constant, so the
    result is extended up to ``stop`` with that constant.
    """
    a, b = f.support
    start = a if start is None else float(start)
    stop = b if stop is None else float(stop)
    if stop <= start:
        return PiecewisePoly.zero(f.degree + 1)
    breaks = _merge_breaks([f.breaks[(f.breaks > start) & (f.breaks < stop)], [start, stop]])
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    local = _local_coeffs(f, breaks[:-1], mids)
    width = local.shape[1] + 1
    integ = np.zeros((local.shape[0], width))
    integ[:, 1:] = local / np.arange(1, width, dtype=float)
    # piece integrals in fixed left-to-right order
    lengths = np.diff(breaks)
    piece_int = _horner(integ, lengths)
    offsets = np.concatenate([[0.0], np.cumsum(piece_int)[:-1]])
    integ[:, 0] = offsets
    return PiecewisePoly(breaks, integ)


def _local_coeffs(f: PiecewisePoly, lefts: np.ndarray, mids: np.ndarray) -> np.ndarray:
    """Coefficients of ``f`` re-expanded about ``lefts`` on the pieces containing ``mids``."""
    out = np.zeros((lefts.size, f.coeffs.shape[1]))
    if f.n_pieces == 0 or lefts.size == 0:
        return out
    idx = np.searchsorted(f.breaks, mids, side="right") - 1
    inside = (idx >= 0) & (idx < f.n_pieces)
    i = idx[inside]
    out[inside] = _taylor_shift(f.coeffs[i], lefts[inside] - f.breaks[i])
    return out


def pp_combine(terms: Sequence[tuple]) -> PiecewisePoly:
    """Finite combination ``sum c_i f_i(scale_i * x - shift_i)``.

    Each term is ``(coefficient, f, scale, shift)`` with ``scale`` a power of
    two.  Breakpoints of all terms are merged; equal breakpoints (to
    :data:`BREAK_TOL`) are deduplicated.  Zero pieces at the ends are dropped.
    """
    mapped = []
    for term in terms:
        c, f, scale, shift = term
        scale = float(scale)
        if scale <= 0 or not math.log2(scale).is_integer():
            raise ValueError(f"scale {scale} is not a power of two")
        if c == 0 or f.n_pieces == 0:
            continue
        breaks = (f.breaks + shift) / scale
        powers = scale ** np.arange(f.coeffs.shape[1], dtype=float)
        mapped.append((float(c), PiecewisePoly(breaks, f.coeffs * powers)))
    if not mapped:
        degree = max((t[1].degree for t in terms), default=0)
        return PiecewisePoly.zero(degree)
    width = max(g.coeffs.shape[1] for _, g in mapped)
    breaks = _merge_breaks([g.breaks for _, g in mapped])
    lefts, mids = breaks[:-1], 0.5 * (breaks[:-1] + breaks[1:])
    acc = np.zeros((lefts.size, width))
    for c, g in mapped:
        acc += c * _pad(_local_coeffs(g, lefts, mids), width)
    return _trim(breaks, acc)


def _common_grid(fs: Sequence[PiecewisePoly], extra=()) -> np.ndarray:
    lo = max(f.support[0] for f in fs)
    hi = min(f.support[1] for f in fs)
    if hi <= lo:
        return np.zeros(0)
    inner = [f.breaks[(f.breaks > lo) & (f.breaks < hi)] for f in fs]
    extra = [e for e in extra if lo < e < hi]
    return _merge_breaks(inner + [np.array(extra, dtype=float), np.array([lo, hi])])


def pp_inner(f: PiecewisePoly, g: PiecewisePoly, weight=None) -> float:
    """``int f g w`` by per-piece Gauss-Legendre quadrature.

    Without a weight, or with a weight whose restriction to every piece is a
    polynomial of known degree, the node count makes the rule exact.  Other
    weights get :data:`NONPOLY_NODES` nodes per piece, with the pieces split
    at the weight's singular points.
    """
    if f.n_pieces == 0 or g.n_pieces == 0:
        return 0.0
    extra = () if weight is None else tuple(weight.breakpoints())
    grid = _common_grid([f, g], extra)
    if grid.size < 2:
        return 0.0
    wdeg = 0 if weight is None else weight.poly_degree()
    if wdeg is None:
        nodes = NONPOLY_NODES
    else:
        nodes = math.ceil((f.degree + g.degree + wdeg + 1) / 2) + 1
    x01, w01 = gauss_legendre(nodes)
    h = np.diff(grid)
    x = grid[:-1, None] + h[:, None] * x01[None, :]
    vals = pp_eval(f, x) * pp_eval(g, x)
    if weight is not None:
        vals = vals * weight(x)
    per_piece = (vals * w01[None, :]).sum(axis=1) * h
    return float(np.sum(per_piece))


def pp_moment(f: PiecewisePoly, k: int, center: float = 0.0) -> float:
    """``int (x - center)**k f(x) dx`` computed exactly per piece."""
    if f.n_pieces == 0:
        return 0.0
    mono = PiecewisePoly.from_polynomial(
        np.polynomial.polynomial.polyfromroots([center] * k) if k else [1.0],
        f.support[0],
        f.support[1],
    )
    return pp_inner(f, mono)
