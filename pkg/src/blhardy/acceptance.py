"""Acceptance checks shared by the test suite and the ``selftest`` command.

Each check returns a :class:`CheckResult` with the measured quantities, the
tolerance it was held to and a pass flag.  Reports contain no timings or
host data, so the same seed gives byte-identical JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._parallel import use_threads
from .embednum import approximation_numbers, embedding_diagonal, factorization_check, rank_k_bruteforce
from .hardy_ops import (
    OperatorSpec,
    hardy_bruteforce_vectors,
    hardy_C,
    hardy_M,
    hardy_N,
    muckenhoupt_single,
    hardy_spectral_p2,
    rl_apply,
    verify_forward,
    verify_reverse,
)
from .spaces import (
    MollifierSpec,
    SequenceCoeffs,
    SpaceParams,
    b_norm,
    besov_norm_via_wavelets,
    f_norm,
    lp_besov_norm,
    single_entry_norm,
)
from .splinecore import PiecewisePoly, bspline, pp_derivative, pp_eval, pp_inner, pp_moment
from .suite import dilation_family, hardy_suite, norm_suite
from .wavelet_construct import (
    SeparableFunction,
    euler_frobenius,
    gram_symbol,
    localized_basis,
    periodized_symbol,
    tensor_basis,
)
from .weights import Weight1D, WeightN, cell_bounds, parse_weight

__all__ = ["CHECKS", "CheckResult", "run_checks", "report_json"]


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool = True
    parts: list = field(default_factory=list)  # (label, value, tolerance, ok)

    def add(self, label: str, value: float, tol: float, ok: Optional[bool] = None, upper: bool = True):
        """Record ``value`` against ``tol`` (``value <= tol`` unless ``ok`` is given)."""
        if ok is None:
            ok = bool(np.isfinite(value) and (value <= tol if upper else value >= tol))
        self.parts.append((label, _num(value), _num(tol), bool(ok)))
        self.passed = self.passed and bool(ok)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.title}"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "parts": [{"label": a, "value": b, "tolerance": c, "ok": d} for a, b, c, d in self.parts],
        }


def _num(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# ---------------------------------------------------------------------------
# 1. B-spline kernel


def check_bsplines(seed: int = 0) -> CheckResult:
    res = CheckResult(1, "B-spline kernel: partition of unity, derivative identity, reference values")
    x = np.linspace(-3.0, 10.0, 1000)
    pu = 0.0
    for n in range(7):
        total = sum(pp_eval(bspline(n, k), x) for k in range(-n - 5, 12))
        pu = max(pu, float(np.max(np.abs(total - 1.0))))
    res.add("partition of unity max error, n<=6", pu, 1e-12)
    diff = 0.0
    for n in range(1, 7):
        lhs = pp_derivative(bspline(n))
        rhs = bspline(n - 1) - bspline(n - 1, 1)
        xs = np.linspace(-1.0, n + 2.0, 1000)
        diff = max(diff, float(np.max(np.abs(lhs(xs) - rhs(xs)))))
    res.add("B_n' = B_{n-1}(x) - B_{n-1}(x-1) residual", diff, 1e-12)
    res.add("|B_2(1.5) - 0.75|", abs(float(bspline(2)(1.5)) - 0.75), 1e-12)
    res.add("|B_3(2) - 2/3|", abs(float(bspline(3)(2.0)) - 2.0 / 3.0), 1e-12)
    return res


# ---------------------------------------------------------------------------
# 2. Euler-Frobenius


def check_euler_frobenius(seed: int = 0) -> CheckResult:
    res = CheckResult(2, "Euler-Frobenius roots, alpha and periodized symbol")
    ef = euler_frobenius(1)
    res.add("n=1 |root - (2 - sqrt 3)|", abs(ef.roots[0] - (2.0 - math.sqrt(3.0))), 1e-12)
    res.add("n=1 |alpha - 3/2|", abs(float(ef.alphas[0]) - 1.5), 1e-12)
    omega = np.linspace(0.05, 2.0 * math.pi - 0.05, 50)
    gap, bad = 0.0, 0
    for n in range(1, 7):
        ef = euler_frobenius(n)
        lhs = periodized_symbol(n, omega)
        rhs = gram_symbol(n, omega)
        gap = max(gap, float(np.max(np.abs(lhs - rhs))))
        roots = np.asarray(ef.roots)
        bad += int(np.sum((roots > 0) & (roots < 1)) != n or roots.size != n)
    res.add("truncated sum vs Gram form, n<=6, 50 frequencies", gap, 1e-8)
    res.add("orders without exactly n roots in (0,1)", bad, 0)
    return res


# ---------------------------------------------------------------------------
# 3. localized wavelets


def check_localized(seed: int = 0) -> CheckResult:
    res = CheckResult(3, "Localized wavelets: supports, vanishing moments, level-0 orthogonality")
    phi_bad, psi_bad, moment, cross = 0, 0, 0.0, 0.0
    first_psi = None
    for n in range(1, 5):
        for m in range(1, 5):
            for kk in (0, 1):
                k = s = 0
                b = localized_basis(n, k, s, m, kk)
                want_phi = (float(k), float(k + n + 1))
                want_psi = (s - n / 2 - m * kk, s + 3 * n / 2 + m * kk + 1)
                phi_bad += int(b.Phi.support != want_phi)
                if b.Psi.support != want_psi:
                    psi_bad += 1
                    if first_psi is None:
                        first_psi = (n, m, kk, b.Psi.support, want_psi)
                scale = math.sqrt(pp_inner(b.PsiTilde, b.PsiTilde))
                for mm in range(n + 1):
                    center = 0.5 * (b.Psi.support[0] + b.Psi.support[1])
                    mom = pp_moment(b.PsiTilde, mm, center) / scale
                    moment = max(moment, abs(mom))
                lo, hi = b.Psi.support
                for t in range(int(math.floor(lo)) - n - 2, int(math.ceil(hi)) + 2):
                    cross = max(cross, abs(pp_inner(b.PhiTilde.shifted(t), b.PsiTilde)))
    res.add("Phi supports differing from [k, k+n+1]", phi_bad, 0)
    res.add("Psi supports differing from [s-n/2-m kk, s+3n/2+m kk+1]", psi_bad, 0)
    if first_psi is not None:
        n, m, kk, got, want = first_psi
        res.parts.append((f"first mismatch n={n} m={m} kk={kk}: got {got}, want {want}", 0.0, 0.0, False))
    res.add("max relative vanishing moment, m'=0..n", moment, 1e-8)
    res.add("max |<Phi~(.-t), Psi~>| over integer t", cross, 1e-8)
    return res


# ---------------------------------------------------------------------------
# 4. sequence norms


def _random_coeffs(rng: np.random.Generator, N: int, D: int) -> SequenceCoeffs:
    out = SequenceCoeffs(N=N, D=D)
    genders = 2**N - 1
    for d in range(D + 1):
        for i in ([0] if d == 0 else range(1, genders + 1)):
            shape = tuple(int(v) for v in rng.integers(1, 4 + 2 * d, size=N))
            offset = tuple(int(v) for v in rng.integers(-3 * 2**d, 2 * 2**d, size=N))
            vals = rng.normal(size=shape) * (rng.random(shape) < 0.7)
            out.set_block(i, d, offset, vals)
    return out


def check_sequence_norms(seed: int = 0) -> CheckResult:
    res = CheckResult(4, "Sequence norms: b = f at p = q, single-entry closed form")
    rng = np.random.default_rng(seed)
    weights = ["const", "power:alpha=0.5", "power:alpha=-0.3,center=0.25", "example:alpha=0.7"]
    gap = 0.0
    for trial in range(100):
        N = 1 + trial % 2
        p = float(rng.choice([1.5, 2.0, 3.0]))
        s = float(rng.uniform(-1.0, 2.0))
        w = parse_weight("*".join([weights[trial % len(weights)]] * N), N)
        P = SpaceParams(p, p, s, N, w)
        lam = _random_coeffs(rng, N, int(rng.integers(1, 4)))
        b, f = b_norm(lam, P), f_norm(lam, P)
        gap = max(gap, abs(b - f) / max(b, 1e-300))
    res.add("max relative |b - f|, 100 random sets", gap, 1e-12)
    from scipy import integrate

    err = 0.0
    for trial in range(20):
        N = 1 + trial % 2
        d = int(rng.integers(1, 5))
        tau = tuple(int(v) for v in rng.integers(-6, 6, size=N))
        p = float(rng.choice([1.5, 2.0, 3.0]))
        s = float(rng.uniform(-1.0, 2.0))
        axis = Weight1D("power", alpha=0.5, center=0.1)
        P = SpaceParams(p, p, s, N, WeightN((axis,) * N))
        mass = 1.0
        for t in tau:
            a, b = cell_bounds(d, t)
            val, _ = integrate.quad(lambda x: abs(x - 0.1) ** 0.5, a, b, points=[0.1] if a < 0.1 < b else None,
                                    epsabs=0.0, epsrel=1e-13, limit=200)
            mass *= val
        direct = 2.0 ** (d * (s - N / p)) * (2.0 ** (d * N) * mass) ** (1.0 / p)
        closed = single_entry_norm(d, tau, P)
        seq = b_norm(SequenceCoeffs.from_entries(N, {(1, d, tau): 1.0}), P)
        err = max(err, abs(closed - direct) / direct, abs(seq - direct) / direct)
    res.add("single entry vs direct integration, relative", err, 1e-10)
    return res


# ---------------------------------------------------------------------------
# 5. norm equivalence


def check_norm_equivalence(seed: int = 0) -> CheckResult:
    res = CheckResult(5, "Norm equivalence: mollifier norm / wavelet norm band and depth stability")
    b = localized_basis(3)
    basis = tensor_basis([b])
    moll = MollifierSpec()
    ratios, change = [], 0.0
    for s in (0.0, 1.0):
        P = SpaceParams(2.0, 2.0, s, 1)
        for _, f in norm_suite():
            pair = []
            for D in (4, 5):
                pair.append(lp_besov_norm(f, P, moll, D) / besov_norm_via_wavelets(f, P, basis, D))
            ratios.append(pair[0])
            change = max(change, abs(pair[1] - pair[0]) / pair[0])
    ratios = np.array(ratios)
    res.add("max/min ratio over 20 functions x s in {0,1}", float(ratios.max() / ratios.min()), 50.0)
    res.add("max relative change D=4 -> 5", change, 0.2)
    return res


# ---------------------------------------------------------------------------
# 6. Hardy constants


def check_hardy_constants(seed: int = 0) -> CheckResult:
    res = CheckResult(6, "Hardy constants: enumeration, brute force band, homogeneity collapse")
    one = Weight1D.one()
    M = hardy_M(one, one, 2.0, 1, 0, 0, 3)
    res.add("|M - 2 sqrt 6|, p=2 m=1 d=0 R=3", abs(M - 2.0 * math.sqrt(6.0)), 1e-12)
    rng = np.random.default_rng(seed)
    lo, hi, spec_gap = math.inf, 0.0, 0.0
    for t in range(10):
        n = int(rng.integers(4, 10))
        wv = np.exp(rng.normal(size=n))
        uv = np.exp(rng.normal(size=n))
        M1 = muckenhoupt_single(wv, uv, 2.0)
        B = hardy_bruteforce_vectors(wv, uv, 2.0, trials=4, seed=seed + t)
        lo, hi = min(lo, B / M1), max(hi, B / M1)
        spec_gap = max(spec_gap, abs(B - hardy_spectral_p2(wv, uv)) / B)
    res.add("min B / M1 over 10 random weights", lo, 1.0, upper=False)
    res.add("max B / M1 over 10 random weights", hi, 2.0)
    res.add("brute force vs exact p=2 spectral norm, relative", spec_gap, 1e-8)
    collapse = 0.0
    for alpha in (-0.5, 0.5, 1.5):
        w = Weight1D("homogeneous", alpha=alpha)
        for p, m in ((2.0, 1), (3.0, 2)):
            M0, N1 = hardy_M(w, w, p, m, 0), hardy_N(w, w, p, m, 1)
            for d in range(1, 5):
                collapse = max(collapse, abs(hardy_M(w, w, p, m, d) - M0) / M0,
                               abs(hardy_N(w, w, p, m, d + 1) - N1) / N1)
    res.add("homogeneous weights: max relative |M(d)-M(0)|, |N(d+1)-N(1)|", collapse, 1e-8)
    return res


# ---------------------------------------------------------------------------
# 7, 8. forward and reverse inequalities


def _hardy_setup():
    b = localized_basis(3)
    basis = tensor_basis([b, b])
    spec = OperatorSpec(("+", "0"), (1, 0), (0.0, 0.0))
    w = parse_weight("const", 2)
    return basis, spec, w, SpaceParams(2.0, 2.0, 1.0, 2, w)


def check_forward(seed: int = 0) -> CheckResult:
    res = CheckResult(7, "Forward inequality: finite ratios, depth stability, dilation family")
    basis, spec, w, P = _hardy_setup()
    C = hardy_C(spec, w, w, 2.0, D=4, R=16).C
    main = verify_forward(spec, w, w, P, hardy_suite(), basis, D=4, C=C)
    fam = verify_forward(spec, w, w, P, dilation_family(), basis, D=4, C=C, stability=False)
    finite = bool(np.all(np.isfinite(main.ratios)) and np.all(main.ratios > 0) and np.all(np.isfinite(fam.ratios)))
    res.add("Hardy constant C (w = u = 1, R = 16)", C, math.inf, ok=math.isfinite(C))
    res.add("all ratios finite", float(main.max), math.inf, ok=finite)
    res.add("relative change of max ratio, D=4 -> 5", main.max_change, 0.2)
    res.add("dilation family max/min", fam.max / fam.min, 10.0)
    return res


def check_reverse(seed: int = 0) -> CheckResult:
    res = CheckResult(8, "Reverse inequality: finite ratios, depth stability")
    basis, spec, w, P = _hardy_setup()
    rep = verify_reverse(spec, w, P, hardy_suite() + dilation_family(), basis, D=4)
    finite = bool(np.all(np.isfinite(rep.ratios)) and np.all(rep.ratios > 0))
    res.add("all ratios finite", float(rep.max), math.inf, ok=finite)
    change = float(np.max(np.abs(rep.ratios_next - rep.ratios) / rep.ratios))
    res.add("max relative change per function, D=4 -> 5", change, 0.2)
    return res


# ---------------------------------------------------------------------------
# 9. Riemann-Liouville


def check_riemann_liouville(seed: int = 0) -> CheckResult:
    res = CheckResult(9, "Riemann-Liouville: monomials, 2D (+,-) product, semigroup")
    x = np.linspace(0.0, 4.0, 401)
    one = PiecewisePoly.constant(1.0, 0.0, 4.0)
    I1 = rl_apply(OperatorSpec(("+",), (1,), (0.0,)), one)
    I2 = rl_apply(OperatorSpec(("+",), (2,), (0.0,)), one)
    res.add("max |I^1 1 - x| on [0,4]", float(np.max(np.abs(I1(x) - x))), 1e-10)
    res.add("max |I^2 1 - x^2/2| on [0,4]", float(np.max(np.abs(I2(x) - x * x / 2))), 1e-10)
    spec2 = OperatorSpec(("+", "-"), (2, 1), (0.0, 0.0))
    f = SeparableFunction.product([PiecewisePoly.constant(1.0, 0.0, 3.0), PiecewisePoly.constant(1.0, -3.0, 0.0)])
    xs, ys = np.linspace(0.0, 3.0, 61), np.linspace(-3.0, 0.0, 61)
    got = rl_apply(spec2, f, grid=(xs, ys))
    want = (xs**2 / 2)[:, None] * (-ys)[None, :]
    res.add("2D (+,-) product vs closed form x^2/2 * (-y)", float(np.max(np.abs(got - want))), 1e-8)
    g = bspline(3)
    s1, s2 = OperatorSpec(("+",), (1,), (0.0,)), OperatorSpec(("+",), (2,), (0.0,))
    xg = np.linspace(0.0, 6.0, 601)
    reach = (8.0,)
    inner = rl_apply(s1, g, reach=reach)
    exact = float(np.max(np.abs(rl_apply(s1, inner, reach=reach)(xg) - rl_apply(s2, g, reach=reach)(xg))))
    res.add("exact path: I^1 I^1 B_3 - I^2 B_3", exact, 1e-8)
    sampled = rl_apply(s1, rl_apply(s1, g(xg), xg), xg) - rl_apply(s2, g(xg), xg)
    res.add("sampled path: I^1 I^1 B_3 - I^2 B_3", float(np.max(np.abs(sampled))), 1e-8)
    return res


# ---------------------------------------------------------------------------
# 10. approximation numbers


def check_embedding(seed: int = 0) -> CheckResult:
    res = CheckResult(10, "Approximation numbers: sorted multipliers, plateaus, factorization, rank-k")
    one = parse_weight("const", 1)
    P1, P2 = SpaceParams(2.0, 2.0, 1.0, 1, one), SpaceParams(2.0, 2.0, 0.5, 1, one)
    D, box = 5, [(0.0, 2.0)]
    model = embedding_diagonal(P1, P2, D, box)
    a = approximation_numbers(model).a
    res.add("a_k vs sorted multipliers", float(np.max(np.abs(a - np.sort(model.multipliers)[::-1]))), 0.0)
    counts = {}
    for (i, d, tau) in model.indices:
        counts[d] = counts.get(d, 0) + 1
    widths = [int(np.sum(np.isclose(a, 2.0 ** (-0.5 * d), rtol=0, atol=1e-14))) for d in range(D + 1)]
    mism = sum(int(widths[d] != counts[d]) for d in range(D + 1))
    res.add("plateau widths differing from per-depth index counts", mism, 0)
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.2, 1.0, size=len(model))
    viol = 0.0
    for K in (8, 32, len(model)):
        rep = factorization_check(model.times(rho), model, float(rho.max()), K)
        viol = max(viol, rep.violation, rep.violation_reverse)
    res.add("factorization violation", viol, 1e-12)
    worst = 0.0
    for t in range(5):
        sig = rng.uniform(0.0, 1.0, size=int(rng.integers(5, 13)))
        srt = np.sort(sig)[::-1]
        for k in range(sig.size):
            worst = max(worst, abs(rank_k_bruteforce(sig, k) - srt[k]))
    res.add("rank-k brute force vs a_{k+1}", worst, 0.0)
    return res


CHECKS: list[Callable[[int], CheckResult]] = [
    check_bsplines,
    check_euler_frobenius,
    check_localized,
    check_sequence_norms,
    check_norm_equivalence,
    check_hardy_constants,
    check_forward,
    check_reverse,
    check_riemann_liouville,
    check_embedding,
]


def report_json(results: list[CheckResult], seed: int) -> str:
    doc = {"seed": seed, "checks": [r.to_dict() for r in results], "passed": all(r.passed for r in results)}
    return json.dumps(doc, indent=2, sort_keys=True)


def run_checks(seed: int = 0, threads: int = 1, numbers=None) -> list[CheckResult]:
    """Run checks 1..10 (or the listed ones) with a fixed thread count."""
    out = []
    with use_threads(threads):
        for k, fn in enumerate(CHECKS, start=1):
            if numbers is None or k in numbers:
                out.append(fn(seed))
    return out


def check_determinism(seed: int = 0, reference: Optional[str] = None) -> CheckResult:
    """Checks 1..10 at 1 and 8 threads must serialize to the same bytes."""
    res = CheckResult(11, "Determinism: byte-identical reports at 1 and 8 threads")
    one = report_json(run_checks(seed, 1), seed)
    eight = report_json(run_checks(seed, 8), seed)
    res.add("reports differ (1 vs 8 threads)", float(one != eight), 0.0)
    if reference is not None:
        res.add("reports differ (reference vs 1 thread)", float(reference != one), 0.0)
    return res
