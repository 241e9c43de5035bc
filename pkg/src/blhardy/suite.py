"""Fixed, versioned test-function suites used by the acceptance checks and the CLI."""

from __future__ import annotations

from typing import Sequence

from .splinecore import PiecewisePoly, bspline, pp_combine, pp_derivative
from .wavelet_construct import SeparableFunction

__all__ = ["SUITE_VERSION", "dilated_bspline", "hardy_suite", "hardy_suite_1d", "norm_suite", "dilation_family"]

SUITE_VERSION = "1"


def dilated_bspline(n: int, j: int = 0, shift: float = 0.0) -> PiecewisePoly:
    """``B_n(2^j x - shift)``."""
    return pp_combine([(1.0, bspline(n), 2.0**j, shift)])


def norm_suite() -> list[tuple[str, PiecewisePoly]]:
    """Twenty one-dimensional splines of order 2..6 at dilation levels 0..2."""
    spec = [
        (2, 0, 0.0), (2, 0, 1.5), (2, 1, 0.0), (2, 1, 3.0),
        (3, 0, 0.0), (3, 0, -2.0), (3, 1, 1.0), (3, 2, 0.0),
        (4, 0, 0.0), (4, 0, 0.5), (4, 1, -1.0), (4, 2, 4.0),
        (5, 0, 0.0), (5, 1, 2.0), (5, 2, -3.0), (6, 0, 0.0),
        (6, 1, 0.0), (6, 2, 1.0),
    ]
    out = [(f"B{n}(2^{j}x-{t:g})", dilated_bspline(n, j, t)) for n, j, t in spec]
    # two combinations: a sign-changing pair and a plateau
    out.append(("B3(x)-B3(x-2)", pp_combine([(1.0, bspline(3), 1, 0), (-1.0, bspline(3), 1, 2)])))
    out.append(("B2(x)+B2(x-1)+B2(x-2)", pp_combine([(1.0, bspline(2), 1, k) for k in range(3)])))
    return out


def hardy_suite_1d(m: int = 1, direction: str = "+", cut: float = 0.0) -> list[tuple[str, PiecewisePoly]]:
    """``f = g^{(m)}`` for compactly supported splines ``g`` on the live side of ``cut``."""
    sign = 1.0 if direction == "+" else -1.0
    gs = [(3, 0, 0.0), (4, 0, 0.0), (3, 1, 1.0), (5, 0, 2.0), (4, 2, 0.0), (6, 1, 0.5)]
    out = []
    for n, j, t in gs:
        g = dilated_bspline(n, j, t)
        # '+' keeps g right of the cut, '-' moves it to end at the cut
        g = g.shifted(cut) if sign > 0 else g.shifted(cut - g.support[1])
        out.append((f"d^{m} B{n}(2^{j}x-{t:g})", pp_derivative(g, m)))
    return out


def _product(fx: PiecewisePoly, fy: PiecewisePoly, active: int) -> SeparableFunction:
    return SeparableFunction.product([fx, fy] if active == 0 else [fy, fx])


def hardy_suite(m: int = 1, active: int = 0, cut: float = 0.0) -> list[tuple[str, SeparableFunction]]:
    """Two-dimensional products ``g_1(x_a)^{(m)} g_2(x_b)`` with ``g_1`` right of ``cut``."""
    pairs = [
        ((2, 0, 0.0), (2, 0, 0.0)),
        ((3, 0, 0.0), (3, 0, 0.0)),
        ((4, 0, 0.0), (4, 0, -1.0)),
        ((3, 0, 1.0), (2, 0, -1.0)),
        ((2, 1, 0.0), (4, 0, 1.0)),
        ((4, 1, 2.0), (3, 1, 0.0)),
        ((7, 1, 0.0), (3, 0, 0.0)),  # smooth bump of width 4 in the active variable
        ((3, 0, 2.0), (7, 1, -2.0)),
    ]
    out = []
    for (n1, j1, t1), (n2, j2, t2) in pairs:
        g1 = dilated_bspline(n1, j1, t1).shifted(cut)
        g2 = dilated_bspline(n2, j2, t2)
        name = f"d^{m} B{n1}(2^{j1}x-{t1:g}) * B{n2}(2^{j2}y-{t2:g})"
        out.append((name, _product(pp_derivative(g1, m), g2, active)))
    return out


def dilation_family(n1: int = 3, n2: int = 3, m: int = 1, active: int = 0, levels: Sequence[int] = (0, 1, 2, 3),
                    cut: float = 0.0) -> list[tuple[str, SeparableFunction]]:
    """``f_j = d^m_a [g(2^j x)]`` for a product of B-splines ``g``."""
    out = []
    for j in levels:
        g1 = dilated_bspline(n1, j, 0.0).shifted(cut)
        g2 = dilated_bspline(n2, j, 0.0)
        out.append((f"j={j}", _product(pp_derivative(g1, m), g2, active)))
    return out
