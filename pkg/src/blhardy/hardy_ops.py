"""Riemann-Liouville integration of natural order and discrete weighted Hardy constants.

The one-sided operators are

    (I^m_+ f)(x) = 1/(m-1)! int_c^x (x - y)^{m-1} f(y) dy,    x >= c,
    (I^m_- f)(x) = 1/(m-1)! int_x^c (y - x)^{m-1} f(y) dy,    x <= c,

applied axis by axis.  The Hardy constants ``M(d)`` and ``N(d)`` are sums
over dyadic cells ``[(r - base - 1/2) 2^-d, (r - base + 1/2) 2^-d]`` with the
translation range truncated at ``R`` cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import interpolate, optimize

from ._parallel import ordered_map
from ._validation import check_exponent
from .splinecore import PiecewisePoly, gauss_legendre, pp_antiderivative, pp_eval
from .spaces import SpaceParams, analyze, as_separable, b_norm, check_order
from .wavelet_construct import SeparableFunction, TensorBasis
from .weights import Weight1D, WeightN, cell_bounds

__all__ = [
    "HardyReport",
    "OperatorSpec",
    "RatioReport",
    "SupportViolationError",
    "WeightMismatchError",
    "hardy_C",
    "hardy_M",
    "hardy_N",
    "hardy_bruteforce",
    "hardy_bruteforce_vectors",
    "hardy_spectral_p2",
    "muckenhoupt_single",
    "rl_apply",
    "verify_forward",
    "verify_reverse",
]

MASK_TOL = 1e-12
TRIM_TOL = 1e-13


class SupportViolationError(ValueError):
    """The input has mass on the dead side of a cut."""


class WeightMismatchError(ValueError):
    """``u`` differs from ``w`` on an axis where no operator acts."""


@dataclass(frozen=True)
class OperatorSpec:
    """Per-axis direction (``'+'``, ``'-'`` or ``'0'``), natural order and cut.

    ``whole_line[k]`` replaces the cut by minus (``'+'``) or plus (``'-'``)
    infinity on that axis.
    """

    star: tuple[str, ...]
    orders: tuple[int, ...]
    cuts: tuple[float, ...]
    whole_line: tuple[bool, ...] = ()

    def __post_init__(self):
        star = tuple(self.star)
        orders = tuple(int(m) for m in self.orders)
        cuts = tuple(float(c) for c in self.cuts)
        whole = tuple(bool(b) for b in self.whole_line) or (False,) * len(star)
        if not (len(star) == len(orders) == len(cuts) == len(whole)):
            raise ValueError("star, orders, cuts and whole_line must have equal length")
        if len(star) not in (1, 2):
            raise ValueError("only N = 1 or N = 2 is supported")
        for s, m in zip(star, orders):
            if s not in ("+", "-", "0"):
                raise ValueError(f"unknown direction {s!r}")
            if m < 0 or (m == 0) != (s == "0"):
                raise ValueError("order 0 exactly on '0' axes")
        if not any(orders):
            raise ValueError("at least one axis needs a positive order")
        for name, val in (("star", star), ("orders", orders), ("cuts", cuts), ("whole_line", whole)):
            object.__setattr__(self, name, val)

    @property
    def N(self) -> int:
        return len(self.star)

    @property
    def active(self) -> list[int]:
        return [k for k, m in enumerate(self.orders) if m > 0]

    @property
    def r_m(self) -> int:
        return len(self.active)

    @property
    def total_order(self) -> int:
        return sum(self.orders)

    def base(self, axis: int) -> int:
        return math.floor(self.cuts[axis])

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorSpec":
        return cls(tuple(data["star"]), tuple(data["orders"]), tuple(data.get("cuts", [0.0] * len(data["star"]))),
                   tuple(data.get("whole_line", ())))

    def to_dict(self) -> dict:
        return {"star": list(self.star), "orders": list(self.orders), "cuts": list(self.cuts),
                "whole_line": list(self.whole_line)}


# ---------------------------------------------------------------------------
# Riemann-Liouville operators


def _reflect(g: PiecewisePoly) -> PiecewisePoly:
    """``x -> g(-x)``."""
    if g.n_pieces == 0:
        return g
    br = g.breaks
    lengths = np.diff(br)
    # on the reflected piece [-b_{i+1}, -b_i) with local s: g's local t = L_i - s
    deg = g.coeffs.shape[1]
    out = np.zeros_like(g.coeffs)
    for j in range(deg):
        cj = g.coeffs[:, j]
        # (L - s)^j = sum_k C(j,k) L^{j-k} (-s)^k
        for k in range(j + 1):
            out[:, k] += cj * math.comb(j, k) * lengths ** (j - k) * (-1.0) ** k
    return PiecewisePoly(-br[::-1], out[::-1])


def _abs_integral(g: PiecewisePoly, lo: float, hi: float) -> float:
    if g.n_pieces == 0 or hi <= lo:
        return 0.0
    a, b = max(lo, g.support[0]), min(hi, g.support[1])
    if b <= a:
        return 0.0
    inner = g.breaks[(g.breaks > a) & (g.breaks < b)]
    grid = np.concatenate([[a], inner, [b]])
    x01, w01 = gauss_legendre(max(4, g.degree + 2))
    h = np.diff(grid)
    x = grid[:-1, None] + h[:, None] * x01
    return float(np.sum(np.abs(pp_eval(g, x)) * w01 * h[:, None]))


def _restrict(g: PiecewisePoly, lo: float, hi: float) -> PiecewisePoly:
    """``g`` times the indicator of ``[lo, hi)``."""
    from .splinecore import _local_coeffs, _merge_breaks, _trim

    a, b = max(lo, g.support[0]), min(hi, g.support[1])
    if g.n_pieces == 0 or b <= a:
        return PiecewisePoly.zero(g.degree)
    br = _merge_breaks([g.breaks[(g.breaks > a) & (g.breaks < b)], [a, b]])
    mids = 0.5 * (br[:-1] + br[1:])
    return _trim(br, _local_coeffs(g, br[:-1], mids))


def _trim_small(g: PiecewisePoly, tol: float = TRIM_TOL) -> PiecewisePoly:
    """Drop end pieces whose coefficients are rounding residue."""
    if g.n_pieces == 0:
        return g
    scale = float(np.max(np.abs(g.coeffs)))
    big = np.flatnonzero(np.max(np.abs(g.coeffs), axis=1) > tol * scale)
    if big.size == 0:
        return PiecewisePoly.zero(g.degree)
    lo, hi = big[0], big[-1]
    return PiecewisePoly(g.breaks[lo : hi + 2], g.coeffs[lo : hi + 1])


def _rl_axis(g: PiecewisePoly, star: str, m: int, cut: float, whole: bool, reach: float) -> PiecewisePoly:
    """Exact ``m``-fold one-sided integral of ``g`` on the live side, up to ``reach``."""
    if star == "0" or m == 0:
        return g
    if g.n_pieces == 0:
        return g
    if star == "-":
        return _reflect(_rl_axis(_reflect(g), "+", m, -cut, whole, -reach))
    if whole:
        cut = min(cut, g.support[0])
    else:
        dead = _abs_integral(g, -math.inf, cut)
        total = _abs_integral(g, -math.inf, math.inf)
        if dead > MASK_TOL * max(total, 1e-300):
            raise SupportViolationError(f"mass {dead:.3e} left of the cut {cut}")
        g = _restrict(g, cut, math.inf)
        if g.n_pieces == 0:
            return g
    out = g
    for _ in range(m):
        out = pp_antiderivative(out, start=cut, stop=max(reach, out.support[1]))
    return _trim_small(out)


def _reach(spec: OperatorSpec, f: SeparableFunction, axis: int, reach) -> float:
    if reach is not None:
        return float(reach[axis])
    lo = min(fs[axis].support[0] for _, fs in f.terms)
    hi = max(fs[axis].support[1] for _, fs in f.terms)
    # one unit past the support so the closed end of the input is covered
    return hi + 1.0 if spec.star[axis] == "+" else lo - 1.0


def _grid_reach(spec: OperatorSpec, f: SeparableFunction, grid) -> list[float]:
    # the exact result must be represented on the whole evaluation grid
    axes = [np.asarray(g, dtype=float) for g in (grid if spec.N > 1 else [grid])]
    out = []
    for k, ax in enumerate(axes):
        base = _reach(spec, f, k, None)
        if spec.star[k] == "+":
            out.append(max(base, float(ax.max()) + 1.0))
        elif spec.star[k] == "-":
            out.append(min(base, float(ax.min()) - 1.0))
        else:
            out.append(base)
    return out


def rl_apply(
    spec: OperatorSpec,
    f,
    grid=None,
    reach: Optional[Sequence[float]] = None,
):
    """Apply the product Riemann-Liouville operator.

    * ``PiecewisePoly`` / ``SeparableFunction``: exact iterated
      antiderivatives; the result is represented up to ``reach[k]`` on each
      active axis (default: one unit past the far end of the input support,
      widened to cover ``grid`` when one is given).  Returns the
      same type, or grid values when ``grid`` is given.
    * callable: composite Gauss rule per grid cell applied to the Cauchy
      kernel, ``N = 1`` only; returns values at ``grid``.
    * ndarray of samples on ``grid`` (a 1-D array, or a tuple of axis arrays
      for ``N = 2``): cubic-spline antiderivatives along each active axis.
    """
    if isinstance(f, (PiecewisePoly, SeparableFunction)):
        sep = as_separable(f)
        if sep.dim != spec.N:
            raise ValueError("dimension mismatch")
        if grid is not None and reach is None:
            reach = _grid_reach(spec, sep, grid)
        terms = []
        for c, fs in sep.terms:
            new = tuple(
                _rl_axis(g, spec.star[k], spec.orders[k], spec.cuts[k], spec.whole_line[k],
                         _reach(spec, sep, k, reach))
                for k, g in enumerate(fs)
            )
            terms.append((c, new))
        out = SeparableFunction(tuple(terms))
        if grid is not None:
            axes = [np.asarray(g, dtype=float) for g in (grid if spec.N > 1 else [grid])]
            if spec.N == 1:
                return out(axes[0])
            return out(axes[0][:, None], axes[1][None, :])
        if isinstance(f, PiecewisePoly):
            return out.terms[0][0] * out.terms[0][1][0]
        return out
    if callable(f):
        if spec.N != 1:
            raise ValueError("callable inputs are supported for N = 1")
        return _rl_callable(spec, f, np.asarray(grid, dtype=float))
    return _rl_samples(spec, np.asarray(f, dtype=float), grid)


def _rl_callable(spec: OperatorSpec, f: Callable, grid: np.ndarray, nodes: int = 16) -> np.ndarray:
    star, m, cut = spec.star[0], spec.orders[0], spec.cuts[0]
    x01, w01 = gauss_legendre(nodes)
    out = np.zeros_like(grid)
    fact = math.factorial(m - 1)
    for idx, x in enumerate(grid):
        a, b = (cut, x) if star == "+" else (x, cut)
        if b <= a:
            continue
        # cells of the grid between a and b
        inner = grid[(grid > a) & (grid < b)]
        edges = np.concatenate([[a], inner, [b]])
        h = np.diff(edges)
        y = edges[:-1, None] + h[:, None] * x01
        kern = np.abs(x - y) ** (m - 1) / fact
        out[idx] = float(np.sum(kern * np.asarray(f(y), dtype=float) * w01 * h[:, None]))
    return out


def _rl_samples(spec: OperatorSpec, values: np.ndarray, grid) -> np.ndarray:
    axes = [np.asarray(grid, dtype=float)] if spec.N == 1 else [np.asarray(g, dtype=float) for g in grid]
    out = values
    for k in spec.active:
        x = axes[k]
        star, m, cut = spec.star[k], spec.orders[k], spec.cuts[k]
        if star == "+":
            dead = x < cut - 1e-15
        else:
            dead = x > cut + 1e-15
        moved = np.moveaxis(out, k, 0)
        if np.any(np.abs(moved[dead]) > 0) and not spec.whole_line[k]:
            total = np.abs(moved).sum()
            if np.abs(moved[dead]).sum() > MASK_TOL * max(total, 1e-300):
                raise SupportViolationError("samples are nonzero on the dead side of the cut")
        moved = np.where(dead.reshape((-1,) + (1,) * (moved.ndim - 1)), 0.0, moved)
        spl = interpolate.CubicSpline(x, moved, axis=0)
        anti = spl.antiderivative(m)
        ref = cut if not spec.whole_line[k] else (x[0] if star == "+" else x[-1])
        # Taylor correction so that the m-fold integral and its lower derivatives vanish at ref
        res = anti(x)
        corr = 0.0
        for j in range(m):
            dj = anti.derivative(j)(ref) if j else anti(ref)
            corr = corr + dj * ((x - ref) ** j / math.factorial(j)).reshape((-1,) + (1,) * (moved.ndim - 1))
        res = res - corr
        if star == "-":
            res = res * (-1.0) ** m
        res = np.where(dead.reshape((-1,) + (1,) * (moved.ndim - 1)), 0.0, res)
        out = np.moveaxis(res, 0, k)
    return out


# ---------------------------------------------------------------------------
# discrete Hardy constants


def _dual(p: float) -> float:
    return p / (p - 1.0)


def _axis_masses(w: Weight1D, d: int, rs: np.ndarray, base: int) -> np.ndarray:
    out = np.empty(rs.size)
    for k, r in enumerate(rs):
        a, b = cell_bounds(d, int(r), base)
        out[k] = w.integral(a, b)
    return out


def _two_sups(wm: np.ndarray, um: np.ndarray, p: float, pow_w: float, pow_u: float, direction: str):
    """Two separate suprema over ``tau``; returns values and arg-sup positions.

    ``wm``/``um`` are masses indexed by position ``0..R`` from the cut
    outward (for ``'-'`` position ``k`` is cell ``base - k``).
    """
    pp = _dual(p)
    R = wm.size - 1
    ubar = um ** (1.0 - pp)
    k = np.arange(R + 1)
    t1 = np.empty(R + 1)
    t2 = np.empty(R + 1)
    for t in range(R + 1):
        far = k[t:]           # cells beyond tau (away from the cut)
        near = k[: t + 1]     # cells between the cut and tau
        dist_far = far - t + 1.0
        dist_near = t - near + 1.0
        a1 = np.sum(dist_far ** (p * pow_w) * wm[far]) ** (1.0 / p)
        b1 = np.sum(ubar[near]) ** (1.0 / pp)
        a2 = np.sum(wm[far]) ** (1.0 / p)
        b2 = np.sum(dist_near ** (pp * pow_u) * ubar[near]) ** (1.0 / pp)
        t1[t] = a1 * b1
        t2[t] = a2 * b2
    return float(t1.max()), float(t2.max()), int(t1.argmax()), int(t2.argmax())


def _positions(d: int, base: int, R: int, direction: str) -> np.ndarray:
    if direction == "+":
        return base + np.arange(R + 1)
    return base - np.arange(R + 1)


def _hardy_terms(w, u, p, m, d, base, R, direction, powers):
    check_exponent(p, "p", lower=1.0)
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    rs = _positions(d, base, R, direction)
    wm = _axis_masses(w, d, rs, base)
    um = _axis_masses(u, d, rs, base)
    return _two_sups(wm, um, p, powers[0], powers[1], direction)


def hardy_M(w: Weight1D, ubar: Weight1D, p: float, m: int, d: int, base: int = 0, R: int = 16,
            direction: str = "+", with_argmax: bool = False):
    """``M(d)``: sum of the two suprema with distance powers ``p(m-1)`` and ``p'(m-1)``."""
    if d < 0:
        raise ValueError("d must be >= 0")
    s1, s2, i1, i2 = _hardy_terms(w, ubar, p, m, d, base, R, direction, (m - 1, m - 1))
    return (s1 + s2, (i1, i2)) if with_argmax else s1 + s2


def hardy_N(w: Weight1D, utilde: Weight1D, p: float, m: int, d: int, base: int = 0, R: int = 16,
            direction: str = "+", with_argmax: bool = False):
    """``N(d)``: as :func:`hardy_M` with powers ``p(2m-1)`` and ``p'(2m-1)``; needs ``d >= 1``."""
    if d < 1:
        raise ValueError("N(d) is defined for d >= 1")
    s1, s2, i1, i2 = _hardy_terms(w, utilde, p, m, d, base, R, direction, (2 * m - 1, 2 * m - 1))
    return (s1 + s2, (i1, i2)) if with_argmax else s1 + s2


def muckenhoupt_single(wv: np.ndarray, uv: np.ndarray, p: float) -> float:
    """``sup_tau (sum_{r>=tau} w_r)^{1/p} (sum_{r<=tau} u_r^{1-p'})^{1/p'}`` for vectors."""
    pp = _dual(p)
    wv, uv = np.asarray(wv, float), np.asarray(uv, float)
    tail = np.cumsum(wv[::-1])[::-1]
    head = np.cumsum(uv ** (1.0 - pp))
    return float(np.max(tail ** (1.0 / p) * head ** (1.0 / pp)))


def hardy_spectral_p2(wv: np.ndarray, uv: np.ndarray) -> float:
    """Exact best constant at ``p = 2``: spectral norm of ``W^{1/2} L U^{-1/2}``."""
    wv, uv = np.asarray(wv, float), np.asarray(uv, float)
    L = np.tril(np.ones((wv.size, wv.size)))
    A = np.sqrt(wv)[:, None] * L / np.sqrt(uv)[None, :]
    return float(np.linalg.norm(A, 2))


def _hardy_ratio(a: np.ndarray, wv: np.ndarray, uv: np.ndarray, p: float) -> float:
    num = np.sum(np.cumsum(a) ** p * wv)
    den = np.sum(a**p * uv)
    return float((num / den) ** (1.0 / p)) if den > 0 else 0.0


def hardy_bruteforce_vectors(wv, uv, p: float, trials: int = 8, seed: int = 0) -> float:
    """Best constant of ``(sum w_t (sum_{r<=t} a_r)^p)^{1/p} <= B (sum u_t a_t^p)^{1/p}`` over ``a >= 0``.

    Multi-start L-BFGS-B on ``a = exp(z)``, seeded with the extremal test
    vectors ``a_r = u_r^{1-p'}`` for ``r <= tau`` (which already attain the
    single-term Muckenhoupt value) and ``trials`` random starts.
    """
    wv, uv = np.asarray(wv, float), np.asarray(uv, float)
    n = wv.size
    if n == 1:
        return float((wv[0] / uv[0]) ** (1.0 / p))
    pp = _dual(p)
    rng = np.random.default_rng(seed)
    starts = []
    for tau in range(n):
        a = np.where(np.arange(n) <= tau, uv ** (1.0 - pp), 1e-12 * uv ** (1.0 - pp))
        starts.append(a)
    starts += [rng.random(n) + 1e-3 for _ in range(trials)]
    best = 0.0
    for a0 in starts:
        best = max(best, _hardy_ratio(a0, wv, uv, p))

        def neg(z):
            a = np.exp(z)
            num = np.sum(np.cumsum(a) ** p * wv)
            den = np.sum(a**p * uv)
            val = -(math.log(num) - math.log(den)) / p
            # gradient of -(log num - log den)/p w.r.t. z
            S = np.cumsum(a)
            g_num = p * np.cumsum((S ** (p - 1) * wv)[::-1])[::-1] * a / num
            g_den = p * a**p * uv / den
            return val, -(g_num - g_den) / p

        res = optimize.minimize(neg, np.log(a0), jac=True, method="L-BFGS-B",
                                bounds=[(-60.0, 60.0)] * n, options={"maxiter": 500})
        best = max(best, _hardy_ratio(np.exp(res.x), wv, uv, p))
    return best


def hardy_bruteforce(w: Weight1D, u: Weight1D, p: float, d: int = 0, base: int = 0, R: int = 8,
                     trials: int = 8, seed: int = 0) -> float:
    """:func:`hardy_bruteforce_vectors` on the cell masses of ``w`` and ``u``."""
    if R > 64:
        raise ValueError("R must be <= 64")
    rs = base + np.arange(R + 1)
    return hardy_bruteforce_vectors(_axis_masses(w, d, rs, base), _axis_masses(u, d, rs, base), p, trials, seed)


@dataclass
class HardyReport:
    p: float
    R: int
    D: int
    axes: list[int]
    M: dict = field(default_factory=dict)   # axis -> array over d = 0..D
    N: dict = field(default_factory=dict)   # axis -> array over d = 1..D+1
    C: float = math.inf
    argsup_depth: int = 0
    inconclusive: bool = False
    weights: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(x):
            return [v if math.isfinite(v) else "inf" for v in np.asarray(x, float).tolist()]

        return {
            "p": self.p,
            "R": self.R,
            "D": self.D,
            "axes": self.axes,
            "M": {str(k): enc(v) for k, v in self.M.items()},
            "N": {str(k): enc(v) for k, v in self.N.items()},
            "C": self.C if math.isfinite(self.C) else "inf",
            "argsup_depth": self.argsup_depth,
            "inconclusive": self.inconclusive,
            "weights": self.weights,
        }


def _check_inactive(spec: OperatorSpec, w: WeightN, u: WeightN, D: int, R: int):
    for k in range(spec.N):
        if spec.orders[k] > 0:
            continue
        for d in range(D + 1):
            for r in range(-R, R + 1):
                a, b = cell_bounds(d, r, 0)
                mw, mu = w.axes[k].integral(a, b), u.axes[k].integral(a, b)
                if abs(mw - mu) > 1e-12 * max(abs(mw), 1.0):
                    raise WeightMismatchError(f"u differs from w on inactive axis {k}")


def hardy_C(
    spec: OperatorSpec,
    w: WeightN,
    u: WeightN,
    p: float,
    D: int = 4,
    R: int = 16,
    ubar: Optional[WeightN] = None,
    utilde: Optional[WeightN] = None,
) -> HardyReport:
    """``C = sup_{d<=D} [sum_axes M(d) + sum_axes N(d+1)]`` over the active axes."""
    if R < 4:
        raise ValueError("R must be >= 4")
    ubar = ubar or u
    utilde = utilde or u
    _check_inactive(spec, w, u, D, R)
    rep = HardyReport(p=float(p), R=R, D=D, axes=spec.active,
                      weights={"w": w.describe(), "u": u.describe(), "ubar": ubar.describe(),
                               "utilde": utilde.describe()})
    tail_start = math.ceil(0.75 * (R + 1))
    total = np.zeros(D + 1)
    flagged = False
    for k in spec.active:
        m, direction = spec.orders[k], spec.star[k]
        base = -(R // 2) if spec.whole_line[k] else spec.base(k)
        Ms, Ns = np.empty(D + 1), np.empty(D + 1)
        for d in range(D + 1):
            Ms[d], am = hardy_M(w.axes[k], ubar.axes[k], p, m, d, base, R, direction, with_argmax=True)
            Ns[d], an = hardy_N(w.axes[k], utilde.axes[k], p, m, d + 1, base, R, direction, with_argmax=True)
            flagged |= any(pos >= tail_start for pos in am + an)
        rep.M[k], rep.N[k] = Ms, Ns
        total += Ms + Ns
    rep.C = float(total.max())
    rep.argsup_depth = int(total.argmax())
    rep.inconclusive = bool(flagged)
    return rep


# ---------------------------------------------------------------------------
# verification harness


@dataclass
class RatioReport:
    kind: str
    D: int
    rows: list = field(default_factory=list)  # (name, numerator, denominator, ratio)
    rows_next: list = field(default_factory=list)
    C: float = 1.0

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows])

    @property
    def ratios_next(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows_next])

    @property
    def max(self) -> float:
        return float(self.ratios.max())

    @property
    def min(self) -> float:
        return float(self.ratios.min())

    @property
    def max_change(self) -> float:
        """Relative change of the maximum ratio under ``D -> D + 1``."""
        if not self.rows_next:
            return math.nan
        return abs(float(self.ratios_next.max()) - self.max) / self.max

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "D": self.D,
            "C": self.C,
            "max": self.max,
            "min": self.min,
            "max_next": float(self.ratios_next.max()) if self.rows_next else None,
            "max_change": self.max_change if self.rows_next else None,
            "rows": [{"name": n, "num": a, "den": b, "ratio": r} for n, a, b, r in self.rows],
        }


def _norm(f, P: SpaceParams, basis: TensorBasis, D: int, r0: float) -> float:
    check_order(min(ax.n for ax in basis.axes), P, r0)
    return b_norm(analyze(f, basis, D, threads=1), P)


def _run_suite(kind, spec, suite, num_fn, den_fn, D, stability, C):
    rep = RatioReport(kind=kind, D=D, C=C)

    def rows_for(depth):
        def one(item):
            name, f = item
            a, b = num_fn(f, depth), den_fn(f, depth)
            return (name, a, b, a / b)

        items = [(n, f) for n, f in suite if not as_separable(f).terms == ()]
        return ordered_map(one, items)

    rep.rows = rows_for(D)
    if stability:
        rep.rows_next = rows_for(D + 1)
    return rep


def verify_forward(
    spec: OperatorSpec,
    w: WeightN,
    u: WeightN,
    P_target: SpaceParams,
    suite: Sequence[tuple[str, object]],
    basis: TensorBasis,
    D: int = 4,
    R: int = 16,
    r0: float = 1.0,
    stability: bool = True,
    C: Optional[float] = None,
) -> RatioReport:
    """``rho(f) = ||I f||_{s, w} / (C ||f||_{s - |m|, u})`` over the suite."""
    if C is None:
        C = hardy_C(spec, w, u, P_target.p, D, R).C
    if not math.isfinite(C):
        raise ValueError("Hardy constant is infinite")
    P_t = P_target.with_weight(w)
    P_s = P_target.with_s(P_target.s - spec.total_order).with_weight(u)
    return _run_suite(
        "forward", spec, suite,
        lambda f, dd: _norm(rl_apply(spec, f), P_t, basis, dd, r0),
        lambda f, dd: C * _norm(f, P_s, basis, dd, r0),
        D, stability, C,
    )


def verify_reverse(
    spec: OperatorSpec,
    w: WeightN,
    P_high: SpaceParams,
    suite: Sequence[tuple[str, object]],
    basis: TensorBasis,
    D: int = 4,
    r0: float = 1.0,
    stability: bool = True,
) -> RatioReport:
    """``rho'(f) = ||f||_{s - |m|, w} / ||I f||_{s, w}``; no Hardy condition involved."""
    P_h = P_high.with_weight(w)
    P_l = P_h.with_s(P_high.s - spec.total_order)
    return _run_suite(
        "reverse", spec, suite,
        lambda f, dd: _norm(f, P_l, basis, dd, r0),
        lambda f, dd: _norm(rl_apply(spec, f), P_h, basis, dd, r0),
        D, stability, 1.0,
    )
