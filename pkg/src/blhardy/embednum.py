"""Approximation numbers of diagonal embedding models between Hilbert sequence spaces.

Only ``p = q = 2`` is covered: there the embedding between two weighted
sequence spaces is a diagonal operator after normalizing each coordinate,
and its approximation numbers are the multipliers sorted in decreasing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .spaces import SpaceParams
from .weights import CellMassTable

__all__ = [
    "DiagonalModel",
    "FactorizationReport",
    "NonHilbertError",
    "SpectrumReport",
    "approximation_numbers",
    "embedding_diagonal",
    "factorization_check",
    "index_set",
    "rank_k_bruteforce",
]


class NonHilbertError(ValueError):
    """Exact approximation numbers need ``p = q = 2``."""


@dataclass(frozen=True)
class DiagonalModel:
    indices: tuple[tuple, ...]
    multipliers: np.ndarray

    def __post_init__(self):
        mult = np.asarray(self.multipliers, dtype=float)
        if mult.shape != (len(self.indices),):
            raise ValueError("one multiplier per index")
        if np.any(~np.isfinite(mult)) or np.any(mult < 0):
            raise ValueError("multipliers must be finite and nonnegative")
        mult.setflags(write=False)
        object.__setattr__(self, "multipliers", mult)
        object.__setattr__(self, "indices", tuple(self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def sorted(self) -> np.ndarray:
        # stable sort keeps ties in index order
        order = np.argsort(-self.multipliers, kind="stable")
        return self.multipliers[order]

    def times(self, rho: Sequence[float]) -> "DiagonalModel":
        rho = np.asarray(rho, dtype=float)
        if rho.shape != self.multipliers.shape:
            raise ValueError("multiplier sequence has the wrong length")
        return DiagonalModel(self.indices, self.multipliers * rho)


@dataclass(frozen=True)
class SpectrumReport:
    a: np.ndarray

    @property
    def norm(self) -> float:
        return float(self.a[0]) if self.a.size else 0.0

    def rows(self) -> list[tuple[int, float]]:
        return [(k + 1, float(v)) for k, v in enumerate(self.a)]


def index_set(N: int, D: int, box: Sequence[tuple[float, float]]) -> list[tuple]:
    """``(i, d, tau)`` with cell centers ``2^-d tau`` in the half-open box, depth-major order."""
    out = []
    genders = 2**N - 1
    for d in range(D + 1):
        ranges = [range(math.ceil(lo * 2**d), math.ceil(hi * 2**d)) for lo, hi in box]
        gs = [0] if d == 0 else range(1, genders + 1)
        for i in gs:
            for tau in np.ndindex(*[len(r) for r in ranges]):
                out.append((i, d, tuple(r[t] for r, t in zip(ranges, tau))))
    return out


def _check_hilbert(P: SpaceParams):
    if P.p != 2 or P.q != 2:
        raise NonHilbertError(f"need p = q = 2, got p={P.p}, q={P.q}")


def embedding_diagonal(P1: SpaceParams, P2: SpaceParams, D: int, box: Sequence[tuple[float, float]]) -> DiagonalModel:
    """Identity from the ``(s1, v)`` space into the ``(s2, w)`` space on a truncated index set.

    ``sigma_{i d tau} = 2^{-d (s1 - s2)} (w(Q_{d tau}) / v(Q_{d tau}))^{1/2}``.
    """
    _check_hilbert(P1)
    _check_hilbert(P2)
    if P1.N != P2.N:
        raise ValueError("dimension mismatch")
    v_tab, w_tab = CellMassTable(P1.weight), CellMassTable(P2.weight)
    idx = index_set(P1.N, D, box)
    mult = np.empty(len(idx))
    for k, (i, d, tau) in enumerate(idx):
        ratio = w_tab.cube_mass(d, tau) / v_tab.cube_mass(d, tau)
        mult[k] = 2.0 ** (-d * (P1.s - P2.s)) * math.sqrt(ratio)
    return DiagonalModel(tuple(idx), mult)


def approximation_numbers(model: DiagonalModel, K: Optional[int] = None) -> SpectrumReport:
    K = len(model) if K is None else int(K)
    if K > len(model):
        raise ValueError(f"K={K} exceeds the {len(model)} indices")
    return SpectrumReport(model.sorted()[:K].copy())


def rank_k_bruteforce(multipliers: Sequence[float], k: int) -> float:
    """Smallest ``max_{j not in S} sigma_j`` over index subsets ``S`` of size ``k``.

    For a diagonal map this is the best rank-``k`` residual norm.
    """
    sig = np.asarray(multipliers, dtype=float)
    if sig.size > 12:
        raise ValueError("brute force is limited to 12 indices")
    if k >= sig.size:
        return 0.0
    best = math.inf
    all_idx = set(range(sig.size))
    for keep in combinations(range(sig.size), k):
        rest = list(all_idx.difference(keep))
        best = min(best, float(sig[rest].max()))
    return best


@dataclass(frozen=True)
class FactorizationReport:
    K: int
    R_norm: float
    Rstar_norm: float
    violation: float
    violation_reverse: float

    @property
    def ok(self) -> bool:
        return self.violation <= 1e-12 and self.violation_reverse <= 1e-12

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "R_norm": self.R_norm,
            "Rstar_norm": self.Rstar_norm if math.isfinite(self.Rstar_norm) else "inf",
            "violation": self.violation,
            "violation_reverse": self.violation_reverse,
            "ok": self.ok,
        }


def factorization_check(
    I_model: DiagonalModel,
    id_model: DiagonalModel,
    R_norm: float,
    K: Optional[int] = None,
) -> FactorizationReport:
    """Check ``a_k(I) <= ||R|| a_k(id)`` and ``a_k(id) <= ||R_*|| a_k(I)``.

    ``I_model`` must carry the same indices as ``id_model``; the surrogate
    ``R_*`` is the inverse multiplier ``id / I`` (infinite norm when some
    multiplier of ``I`` vanishes while ``id`` does not).
    """
    if I_model.indices != id_model.indices:
        raise ValueError("models must share the index set")
    K = len(id_model) if K is None else int(K)
    a_I = approximation_numbers(I_model, K).a
    a_id = approximation_numbers(id_model, K).a
    viol = float(np.max(a_I - R_norm * a_id, initial=0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(id_model.multipliers == 0, 0.0, id_model.multipliers / I_model.multipliers)
    rstar = float(np.max(inv)) if inv.size else 0.0
    if math.isfinite(rstar):
        viol_rev = float(np.max(a_id - rstar * a_I, initial=0.0))
    else:
        viol_rev = 0.0
    return FactorizationReport(K, float(R_norm), rstar, max(viol, 0.0), max(viol_rev, 0.0))
