"""Product weights, dyadic cell masses and local Muckenhoupt constants.

A one-dimensional weight knows closed-form integrals of its powers, so masses
of cells and of Muckenhoupt averages never go through quadrature across a
singularity.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "CellMassTable",
    "MuckReport",
    "NonIntegrableWeightError",
    "Weight1D",
    "WeightN",
    "cell_bounds",
    "cell_mass",
    "cube_family",
    "doubling_probe",
    "muck_constant",
    "parse_weight",
    "r0_estimate",
]

VARIANTS = ("constant", "power", "example", "homogeneous")
CHEB_NODES = 64


class NonIntegrableWeightError(ValueError):
    """A power of the weight is not integrable over the requested cell."""


def _power_antideriv(x: float, center: float, e: float) -> float:
    """Antiderivative of ``|x - center|^e`` vanishing at ``center``."""
    t = x - center
    if e == -1.0:
        return math.copysign(1.0, t) * math.log(abs(t))
    return math.copysign(abs(t) ** (e + 1.0), t) / (e + 1.0)


@dataclass(frozen=True)
class Weight1D:
    """One-dimensional weight.

    ``constant``: ``c``.
    ``power``: ``|x - center|^alpha``.
    ``example``: ``|x|^alpha`` on ``[-1, 1]`` and ``exp(|x| - 1)`` outside.
    ``homogeneous``: ``|x|^alpha``, homogeneous of degree ``alpha``.
    """

    variant: str = "constant"
    alpha: float = 0.0
    center: float = 0.0
    c: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown weight variant {self.variant!r}")
        if self.variant == "constant" and not self.c > 0:
            raise ValueError("constant weight must be positive")
        if self.variant != "constant" and not self.alpha > -1:
            raise NonIntegrableWeightError(f"alpha={self.alpha} is not locally integrable")
        if self.variant == "homogeneous" and self.center != 0.0:
            raise ValueError("homogeneous weights are centered at 0")

    # -- descriptors -------------------------------------------------------

    @classmethod
    def one(cls) -> "Weight1D":
        return cls("constant", c=1.0)

    def describe(self) -> str:
        if self.variant == "constant":
            return f"const:c={self.c:g}"
        if self.variant == "power":
            return f"power:alpha={self.alpha:g},center={self.center:g}"
        return f"{self.variant}:alpha={self.alpha:g}"

    def _pole(self) -> float:
        return 0.0 if self.variant in ("example", "homogeneous") else self.center

    def breakpoints(self) -> list[float]:
        if self.variant == "constant":
            return []
        if self.variant == "example":
            return [-1.0, 0.0, 1.0]
        return [self._pole()]

    def poly_degree(self) -> Optional[int]:
        """Degree when the weight is a polynomial on each side of its breakpoints."""
        if self.variant == "constant":
            return 0
        if self.variant == "example":
            return None
        if float(self.alpha).is_integer() and self.alpha >= 0:
            return int(self.alpha)
        return None

    # -- values ------------------------------------------------------------

    def __call__(self, x):
        return self.power(x, 1.0)

    def power(self, x, gamma: float = 1.0):
        """Pointwise ``w(x)^gamma``."""
        x = np.asarray(x, dtype=float)
        if self.variant == "constant":
            return np.full(x.shape, self.c**gamma)[()]
        with np.errstate(divide="ignore"):
            if self.variant in ("power", "homogeneous"):
                return (np.abs(x - self._pole()) ** (gamma * self.alpha))[()]
            ax = np.abs(x)
            inner = ax ** (gamma * self.alpha)
            outer = np.exp(gamma * (ax - 1.0))
            return np.where(ax <= 1.0, inner, outer)[()]

    def integral(self, a: float, b: float, gamma: float = 1.0) -> float:
        """``int_a^b w^gamma``; ``inf`` when the singularity is not integrable."""
        if b < a:
            raise ValueError("need a <= b")
        if b == a:
            return 0.0
        if self.variant == "constant":
            return self.c**gamma * (b - a)
        if self.variant in ("power", "homogeneous"):
            return self._power_integral(a, b, self._pole(), gamma * self.alpha)
        # example weight: split at +-1
        total = 0.0
        lo, hi = max(a, -1.0), min(b, 1.0)
        if hi > lo:
            total += self._power_integral(lo, hi, 0.0, gamma * self.alpha)
        if b > 1.0:
            total += self._exp_integral(max(a, 1.0), b, gamma)
        if a < -1.0:
            total += self._exp_integral(-min(b, -1.0), -a, gamma)
        return total

    @staticmethod
    def _power_integral(a: float, b: float, center: float, e: float) -> float:
        if e <= -1.0 and a <= center <= b:
            return math.inf
        return _power_antideriv(b, center, e) - _power_antideriv(a, center, e)

    @staticmethod
    def _exp_integral(a: float, b: float, gamma: float) -> float:
        """``int_a^b exp(gamma (x - 1))`` for ``1 <= a <= b``."""
        if gamma == 0.0:
            return b - a
        return (math.exp(gamma * (b - 1.0)) - math.exp(gamma * (a - 1.0))) / gamma

    def sup_reciprocal(self, a: float, b: float) -> float:
        """``max 1/w`` on ``[a, b]`` over Chebyshev nodes, endpoints and breakpoints.

        All variants are monotone between breakpoints, so including the
        endpoints and interior breakpoints makes the value exact.
        """
        k = np.arange(CHEB_NODES)
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * k + 1) * np.pi / (2 * CHEB_NODES))
        extra = [x for x in self.breakpoints() if a <= x <= b]
        pts = np.concatenate([nodes, [a, b], extra])
        with np.errstate(divide="ignore"):
            vals = self.power(pts, -1.0)
        return float(np.max(vals))


@dataclass(frozen=True)
class WeightN:
    """Product weight ``w(x) = prod_l w_l(x_l)``."""

    axes: tuple[Weight1D, ...]

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if len(self.axes) not in (1, 2):
            raise ValueError("only N = 1 or N = 2 is supported")

    @property
    def N(self) -> int:
        return len(self.axes)

    def __call__(self, *xs):
        out = 1.0
        for w, x in zip(self.axes, xs):
            out = out * w(x)
        return out

    def describe(self) -> str:
        return "*".join(w.describe() for w in self.axes)


def parse_weight(text: str, N: Optional[int] = None) -> WeightN:
    """Parse ``"power:alpha=0.5,center=0*const:c=1"`` style descriptions.

    Factors are separated by ``*``.  A single factor is repeated to ``N`` axes.
    """
    aliases = {"const": "constant", "constant": "constant", "power": "power",
               "example": "example", "homog": "homogeneous", "homogeneous": "homogeneous"}
    axes = []
    for part in text.split("*"):
        name, _, args = part.strip().partition(":")
        if name not in aliases:
            raise ValueError(f"unknown weight variant {name!r}")
        kwargs = {}
        for item in filter(None, (s.strip() for s in args.split(","))):
            key, _, val = item.partition("=")
            if key not in ("alpha", "center", "c"):
                raise ValueError(f"unknown weight parameter {key!r}")
            kwargs[key] = float(val)
        axes.append(Weight1D(aliases[name], **kwargs))
    if N is not None and len(axes) == 1:
        axes = axes * N
    if N is not None and len(axes) != N:
        raise ValueError(f"weight has {len(axes)} factors, expected {N}")
    return WeightN(tuple(axes))


# ---------------------------------------------------------------------------
# cell masses


def cell_bounds(d: int, r: int, base: int = 0) -> tuple[float, float]:
    """``[(r - base - 1/2) 2^-d, (r - base + 1/2) 2^-d]``."""
    h = 2.0 ** (-d)
    return ((r - base - 0.5) * h, (r - base + 0.5) * h)


def cell_mass(w: Weight1D, d: int, r: int, base: int = 0) -> float:
    if d < 0:
        raise ValueError("depth must be >= 0")
    a, b = cell_bounds(d, r, base)
    m = w.integral(a, b)
    if not math.isfinite(m):
        raise NonIntegrableWeightError(f"weight not integrable on [{a}, {b}]")
    return m


@dataclass
class CellMassTable:
    """Memoized per-axis masses ``w_l(Q^{[base]}_{d r})``.

    Reads are lock-free; a miss computes the value and inserts it only if no
    other thread got there first, so every reader sees one value per key.
    """

    weight: WeightN
    _memo: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def mass(self, axis: int, d: int, r: int, base: int = 0) -> float:
        key = (axis, d, r, base)
        val = self._memo.get(key)
        if val is None:
            val = cell_mass(self.weight.axes[axis], d, r, base)
            with self._lock:
                val = self._memo.setdefault(key, val)
        return val

    def masses(self, axis: int, d: int, rs: Sequence[int], base: int = 0) -> np.ndarray:
        return np.array([self.mass(axis, d, int(r), base) for r in rs])

    def cube_mass(self, d: int, tau: Sequence[int]) -> float:
        """``w(Q_{d tau})`` for the cube centered at ``2^-d tau``."""
        out = 1.0
        for axis, t in enumerate(tau):
            out *= self.mass(axis, d, int(t), 0)
        return out

    def __len__(self) -> int:
        return len(self._memo)


# ---------------------------------------------------------------------------
# Muckenhoupt constants


@dataclass(frozen=True)
class MuckReport:
    p: float
    estimate: float
    per_level: tuple[float, ...]
    family: str
    r0_estimate: Optional[float] = None

    @property
    def diverges(self) -> bool:
        return not math.isfinite(self.estimate)

    def to_dict(self) -> dict:
        def enc(v):
            return v if math.isfinite(v) else "inf"

        return {
            "p": self.p,
            "estimate": enc(self.estimate),
            "per_level": [enc(v) for v in self.per_level],
            "family": self.family,
            "r0_estimate": self.r0_estimate,
        }


def cube_family(levels: int = 4, window: float = 2.0) -> list[tuple[int, np.ndarray]]:
    """Per level ``j``: cube side ``2^-j`` and centers ``2^-j Z`` inside ``[-window, window]``."""
    out = []
    for j in range(levels + 1):
        h = 2.0**-j
        k = np.arange(-math.floor(window / h), math.floor(window / h) + 1)
        out.append((j, k * h))
    return out


def _axis_ap(w: Weight1D, p: float, lo: float, hi: float) -> float:
    """One-axis Muckenhoupt quantity on ``[lo, hi]``."""
    size = hi - lo
    avg = w.integral(lo, hi) / size
    if p == 1.0:
        return avg * w.sup_reciprocal(lo, hi)
    pp = p / (p - 1.0)
    dual = w.integral(lo, hi, 1.0 - pp) / size
    if not math.isfinite(dual):
        return math.inf
    return avg * dual ** (p - 1.0)


def muck_constant(w: WeightN, p: float, levels: int = 4, window: float = 2.0) -> MuckReport:
    """Supremum of the local ``A_p`` quantity over a dyadic cube family.

    For a product weight the quantity on ``Q_1 x Q_2`` is the product of the
    one-axis quantities, so the supremum over equal-side cubes is the product
    of per-axis suprema at each level.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    per_level = []
    for j, centers in cube_family(levels, window):
        h = 2.0**-j
        level = 1.0
        for axis in w.axes:
            level *= max(_axis_ap(axis, p, c - h / 2, c + h / 2) for c in centers)
        per_level.append(float(level))
    family = f"cubes of side 2^-j, centers on 2^-j Z^{w.N} in [-{window:g},{window:g}]^{w.N}, j=0..{levels}"
    return MuckReport(float(p), max(per_level), tuple(per_level), family)


def _stabilizes(levels: Sequence[float], threshold: float, rel: float = 0.1) -> bool:
    if not all(math.isfinite(v) for v in levels):
        return False
    if levels[-1] > threshold:
        return False
    return abs(levels[-1] - levels[-2]) <= rel * abs(levels[-2])


def r0_estimate(
    w: WeightN,
    p_grid: Sequence[float] = (1.0, 1.25, 1.5, 2.0, 3.0, 4.0),
    threshold: float = 1e6,
    levels: int = 4,
    window: float = 2.0,
) -> float:
    """Smallest grid ``p`` whose constant stays below ``threshold`` and stops growing.

    This is an upper bound for the infimum of admissible ``p``; ``inf`` when
    no grid value qualifies.
    """
    grid = list(p_grid)
    if grid != sorted(grid):
        raise ValueError("p grid must be ascending")
    for p in grid:
        rep = muck_constant(w, p, levels, window)
        if _stabilizes(rep.per_level, threshold):
            return float(p)
    return math.inf


def doubling_probe(w: WeightN, t: float, centers: Sequence[float] = tuple(range(-4, 5))) -> float:
    """``max log(w(tQ)/w(Q)) / t`` over unit cubes centered on the given grid."""
    if not 1.0 <= t <= 8.0:
        raise ValueError("t must be in [1, 8]")
    best = -math.inf
    for c in product(centers, repeat=w.N):
        ratio = 1.0
        for axis, x in zip(w.axes, c):
            big = axis.integral(x - t / 2, x + t / 2)
            small = axis.integral(x - 0.5, x + 0.5)
            ratio *= big / small
        best = max(best, math.log(ratio) / t)
    return best
