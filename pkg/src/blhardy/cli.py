"""Command-line interface.

Every command writes a JSON report (or a CSV table with ``--format csv``)
to ``--out`` or standard output.  Options can also come from a JSON file
given with ``--config``; explicit flags win.  Exit codes: 0 success,
1 failed self-test, 2 usage error, 3 validation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._parallel import THREADS_ENV, thread_count, use_threads
from .acceptance import check_determinism, report_json, run_checks
from .embednum import NonHilbertError, approximation_numbers, embedding_diagonal
from .hardy_ops import OperatorSpec, hardy_C, verify_forward, verify_reverse
from .spaces import MollifierSpec, SpaceParams, analyze, besov_norm_via_wavelets, lp_besov_norm
from .splinecore import PiecewisePoly, bspline, pp_combine, pp_inner
from .suite import SUITE_VERSION, dilation_family, hardy_suite, hardy_suite_1d
from .wavelet_construct import SeparableFunction, euler_frobenius, localized_basis, tensor_basis
from .weights import muck_constant, parse_weight, r0_estimate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3, 4

# options that never change the numbers and stay out of the config hash
_NON_SEMANTIC = {"out", "format", "threads", "config", "command", "handler"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# parsing helpers


def _floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v.strip()]


def _tmask(text: Optional[str], n: int):
    if not text:
        return None
    items = [v.strip() for v in text.split(",")]
    if any(v not in ("r", "1/r") for v in items):
        raise ValueError("tmask entries must be 'r' or '1/r'")
    if len(items) != n:
        raise ValueError(f"tmask needs {n} entries")
    return [v == "1/r" for v in items]


def parse_function(text: str, N: int = 1):
    """``bspline:n=3,j=1,shift=0.5`` factors joined by ``*`` (one per axis).

    A factor may carry ``deriv=k`` to differentiate it ``k`` times.  With
    ``N = 2`` a single factor is used on both axes.
    """
    from .splinecore import pp_derivative

    factors = []
    for part in text.split("*"):
        name, _, args = part.strip().partition(":")
        if name != "bspline":
            raise ValueError(f"unknown function family {name!r}")
        kw = {"n": 3.0, "j": 0.0, "shift": 0.0, "deriv": 0.0}
        for item in filter(None, (s.strip() for s in args.split(","))):
            key, _, val = item.partition("=")
            if key not in kw:
                raise ValueError(f"unknown function parameter {key!r}")
            kw[key] = float(val)
        g = pp_combine([(1.0, bspline(int(kw["n"])), 2.0 ** int(kw["j"]), kw["shift"])])
        factors.append(pp_derivative(g, int(kw["deriv"])) if kw["deriv"] else g)
    if len(factors) == 1 and N == 2:
        factors = factors * 2
    if len(factors) != N:
        raise ValueError(f"function has {len(factors)} factors, expected {N}")
    return factors[0] if N == 1 else SeparableFunction.product(factors)


def _encode(obj):
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def config_of(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_SEMANTIC}


def config_hash(config: dict) -> str:
    blob = json.dumps(_encode(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class Output:
    """A JSON report plus an optional CSV table for one command run."""

    def __init__(self, args, truncation: dict):
        self.args = args
        self.config = config_of(args)
        self.hash = config_hash(self.config)
        self.truncation = truncation
        self.report: dict = {}
        self.header: list[str] = []
        self.rows: list[list] = []

    def render(self) -> str:
        if self.args.format == "csv":
            buf = io.StringIO()
            buf.write(f"# command={self.args.command} config_hash={self.hash} version={__version__}\n")
            trunc = " ".join(f"{k}={v}" for k, v in sorted(self.truncation.items()))
            buf.write(f"# truncation {trunc or 'none'}\n")
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.header)
            for row in self.rows:
                writer.writerow([_csv_cell(v) for v in row])
            return buf.getvalue()
        doc = {
            "command": self.args.command,
            "config": self.config,
            "config_hash": self.hash,
            "truncation": self.truncation,
            "version": __version__,
            "result": self.report,
        }
        if self.rows:
            doc["table"] = {"header": self.header, "rows": self.rows}
        return json.dumps(_encode(doc), indent=2, sort_keys=True) + "\n"


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


# ---------------------------------------------------------------------------
# commands


def cmd_ef(args) -> Output:
    ef = euler_frobenius(args.order, _tmask(args.tmask, args.order))
    out = Output(args, {})
    out.report = ef.to_dict()
    out.header = ["j", "root", "alpha"]
    out.rows = [[j + 1, r, a] for j, (r, a) in enumerate(zip(ef.roots, ef.alphas))]
    return out


def _samples(f: PiecewisePoly, count: int):
    lo, hi = f.support
    xs = np.linspace(lo, hi, count)
    return [[float(x), float(y)] for x, y in zip(xs, f(xs))]


def cmd_spline(args) -> Output:
    f = bspline(args.order, args.shift)
    out = Output(args, {})
    out.report = {"support": list(f.support), "degree": f.degree}
    if args.dump:
        out.report.update(f.to_dict())
    out.header = ["x", "y"]
    out.rows = _samples(f, args.samples)
    return out


def cmd_wavelet(args) -> Output:
    b = localized_basis(args.order, args.k, args.s, args.m, args.kk, _tmask(args.tmask, args.order))
    f = {"phi": b.Phi, "psi": b.Psi, "phitilde": b.PhiTilde, "psitilde": b.PsiTilde}[args.which]
    out = Output(args, {})
    out.report = {
        "which": args.which,
        "support": list(f.support),
        "lam1": b.ef.lam1,
        "lam2": b.lam2,
        "norm_sq": pp_inner(f, f),
    }
    if args.dump:
        out.report.update(f.to_dict())
    out.header = ["x", "y"]
    out.rows = _samples(f, args.samples)
    return out


def cmd_muck(args) -> Output:
    w = parse_weight(args.weight, args.N)
    grid = _floats(args.p_grid)
    out = Output(args, {"levels": args.levels, "window": args.window})
    reps = [muck_constant(w, p, args.levels, args.window) for p in grid]
    r0 = r0_estimate(w, grid, args.threshold, args.levels, args.window)
    out.report = {"weight": w.describe(), "r0_estimate": r0, "constants": [r.to_dict() for r in reps]}
    out.header = ["p", "estimate", "diverges"]
    out.rows = [[r.p, r.estimate, r.diverges] for r in reps]
    return out


def _basis(args, N: int):
    b = localized_basis(args.order, 0, 0, args.m, args.kk)
    return tensor_basis([b] * N)


def cmd_coeffs(args) -> Output:
    f = parse_function(args.function, args.N)
    box = [tuple(_floats(args.box))] * args.N if args.box else None
    lam = analyze(f, _basis(args, args.N), args.depth, box)
    out = Output(args, {"D": args.depth, "box": args.box, "truncated": lam.truncated})
    out.report = lam.to_dict()
    out.header = ["gender", "depth", "tau", "value"]
    out.rows = [[i, d, " ".join(map(str, tau)), v] for i, d, tau, v in lam.entries()]
    return out


def _space(args, N: int) -> SpaceParams:
    return SpaceParams(args.p, args.q, args.s, N, parse_weight(args.weight, N))


def cmd_norm(args) -> Output:
    f = parse_function(args.function, args.N)
    P = _space(args, args.N)
    basis = _basis(args, args.N)
    out = Output(args, {"D": args.depth})
    wav = besov_norm_via_wavelets(f, P, basis, args.depth, r0=args.r0, scale=args.scale)
    out.report = {"wavelet_norm": wav, "scale": args.scale}
    if args.mollifier:
        moll = lp_besov_norm(f, P, MollifierSpec(), args.depth)
        out.report.update({"mollifier_norm": moll, "ratio": moll / wav})
    out.header = ["quantity", "value"]
    out.rows = [[k, v] for k, v in out.report.items() if isinstance(v, float)]
    return out


def _operator(args) -> OperatorSpec:
    star = [v.strip() for v in args.star.split(",")]
    return OperatorSpec(tuple(star), tuple(_ints(args.orders)), tuple(_floats(args.cuts)))


def cmd_hardy(args) -> Output:
    spec = _operator(args)
    w = parse_weight(args.w, spec.N)
    u = parse_weight(args.u, spec.N) if args.u else w
    rep = hardy_C(spec, w, u, args.p, args.depth, args.R)
    out = Output(args, {"D": args.depth, "R": args.R, "inconclusive": rep.inconclusive})
    out.report = rep.to_dict()
    out.header = ["axis", "d", "M", "N"]
    out.rows = [[k, d, float(rep.M[k][d]), float(rep.N[k][d])] for k in sorted(rep.M) for d in range(args.depth + 1)]
    return out


def _suite(name: str, spec: OperatorSpec):
    axis = spec.active[0]
    m = spec.orders[axis]
    if spec.N == 1:
        if name != "hardy":
            raise ValueError("one-dimensional verification uses the 'hardy' suite")
        return hardy_suite_1d(m, spec.star[axis], spec.cuts[axis])
    if spec.star[axis] != "+" or spec.r_m != 1:
        raise ValueError("two-dimensional suites cover one '+' axis")
    if name == "hardy":
        return hardy_suite(m, axis, spec.cuts[axis])
    if name == "dilation":
        return dilation_family(m=m, active=axis, cut=spec.cuts[axis])
    if name == "all":
        return hardy_suite(m, axis, spec.cuts[axis]) + dilation_family(m=m, active=axis, cut=spec.cuts[axis])
    raise ValueError(f"unknown suite {name!r}")


def cmd_verify(args) -> Output:
    spec = _operator(args)
    w = parse_weight(args.w, spec.N)
    u = parse_weight(args.u, spec.N) if args.u else w
    P = SpaceParams(args.p, args.q, args.s, spec.N, w)
    basis = _basis(args, spec.N)
    suite = _suite(args.suite, spec)
    if args.kind == "forward":
        rep = verify_forward(spec, w, u, P, suite, basis, args.depth, args.R, args.r0)
    else:
        rep = verify_reverse(spec, w, P, suite, basis, args.depth, args.r0)
    out = Output(args, {"D": args.depth, "R": args.R, "suite_version": SUITE_VERSION})
    out.report = rep.to_dict()
    out.header = ["name", "numerator", "denominator", "ratio"]
    out.rows = [list(r) for r in rep.rows]
    return out


def cmd_embed(args) -> Output:
    parts = args.weights.split(";")
    v = parse_weight(parts[0], args.N)
    w = parse_weight(parts[-1], args.N)
    P1 = SpaceParams(2.0, 2.0, args.s1, args.N, v)
    P2 = SpaceParams(2.0, 2.0, args.s2, args.N, w)
    box = [tuple(_floats(args.box))] * args.N
    model = embedding_diagonal(P1, P2, args.depth, box)
    K = min(args.K, len(model)) if args.K else len(model)
    rep = approximation_numbers(model, K)
    out = Output(args, {"D": args.depth, "box": args.box, "indices": len(model)})
    out.report = {"norm": rep.norm, "a": rep.a}
    out.header = ["k", "a_k"]
    out.rows = [[k, a] for k, a in rep.rows()]
    return out


def cmd_selftest(args) -> Output:
    numbers = set(_ints(args.checks)) if args.checks else None
    results = run_checks(args.seed, thread_count(), numbers)
    body = report_json(results, args.seed)
    if not args.skip_determinism and (numbers is None or 11 in numbers):
        results.append(check_determinism(args.seed, reference=body if numbers is None else None))
    for r in results:
        print(r.line(), file=sys.stderr)
    out = Output(args, {})
    out.report = json.loads(report_json(results, args.seed))
    out.header = ["check", "passed"]
    out.rows = [[r.number, r.passed] for r in results]
    out.failed = not all(r.passed for r in results)
    return out


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")
    p.add_argument("--seed", type=int, default=0)


def _basis_opts(p: argparse.ArgumentParser, order: int = 3):
    p.add_argument("--order", type=int, default=order)
    p.add_argument("--m", type=int, default=1, help="auxiliary order of the smoothing filter")
    p.add_argument("--kk", type=int, default=0, choices=(0, 1), help="apply the smoothing filter")


def _space_opts(p: argparse.ArgumentParser):
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--r0", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blhardy", description="Spline wavelets, weighted Besov norms and Hardy constants")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ef", help="Euler-Frobenius roots and constants")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--tmask", help="comma list of 'r' or '1/r'")
    p.set_defaults(handler=cmd_ef)

    p = sub.add_parser("spline", help="B-spline of a given order")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--dump", action="store_true", help="include breakpoints and pieces")
    p.add_argument("--samples", type=int, default=65)
    p.set_defaults(handler=cmd_spline)

    p = sub.add_parser("wavelet", help="localized scaling function or wavelet")
    _basis_opts(p)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--tmask")
    p.add_argument("--which", choices=("phi", "psi", "phitilde", "psitilde"), default="psi")
    p.add_argument("--dump", action="store_true")
    p.add_argument("--samples", type=int, default=129)
    p.set_defaults(handler=cmd_wavelet)

    p = sub.add_parser("muck", help="local Muckenhoupt constants and r0")
    p.add_argument("--weight", default="const")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--p-grid", default="1,1.25,1.5,2,3,4")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--window", type=float, default=2.0)
    p.add_argument("--threshold", type=float, default=1e6)
    p.set_defaults(handler=cmd_muck)

    p = sub.add_parser("coeffs", help="wavelet coefficients of a test function")
    _basis_opts(p)
    p.add_argument("--function", default="bspline:n=3")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--box", help="lo,hi applied to every axis")
    p.set_defaults(handler=cmd_coeffs)

    p = sub.add_parser("norm", help="weighted Besov or Triebel-Lizorkin norm")
    _basis_opts(p)
    _space_opts(p)
    p.add_argument("--function", default="bspline:n=3")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--weight", default="const")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--scale", choices=("b", "f"), default="b")
    p.add_argument("--mollifier", action="store_true", help="also compute the mollifier norm")
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser("hardy", help="discrete Hardy constants M, N and C")
    p.add_argument("--star", default="+")
    p.add_argument("--orders", default="1")
    p.add_argument("--cuts", default="0")
    p.add_argument("--w", default="const")
    p.add_argument("--u")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--R", type=int, default=16)
    p.set_defaults(handler=cmd_hardy)

    p = sub.add_parser("verify", help="forward or reverse norm inequality on a test suite")
    _basis_opts(p)
    _space_opts(p)
    p.add_argument("--kind", choices=("forward", "reverse"), default="forward")
    p.add_argument("--star", default="+,0")
    p.add_argument("--orders", default="1,0")
    p.add_argument("--cuts", default="0,0")
    p.add_argument("--w", default="const")
    p.add_argument("--u")
    p.add_argument("--suite", default="all", choices=("hardy", "dilation", "all"))
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--R", type=int, default=16)
    p.set_defaults(handler=cmd_verify, s=1.0)

    p = sub.add_parser("embed", help="approximation numbers of a diagonal embedding (p = q = 2)")
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--weights", default="const", help="'v;w' or one weight for both")
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--box", default="0,2")
    p.add_argument("--K", type=int, default=0, help="number of a_k to report (0: all)")
    p.set_defaults(handler=cmd_embed)

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--checks", help="comma list of check numbers (default: all)")
    p.add_argument("--skip-determinism", action="store_true")
    p.set_defaults(handler=cmd_selftest)

    for name, sp in sub.choices.items():
        _common(sp)
    return parser


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    path = _config_path(argv)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if path is None or command not in choices:
        return parser.parse_args(argv)
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    sub = choices[command]
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    known = {a.dest for a in sub._actions}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    # required flags may come from the file; command-line flags still win
    for action in sub._actions:
        if action.dest in cfg:
            action.required = False
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = _apply_config(parser, argv)
        except UsageError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        threads = args.threads if args.threads else thread_count()
        with use_threads(threads):
            out = args.handler(args)
        text = out.render()
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_FAIL if getattr(out, "failed", False) else EXIT_OK
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, NonHilbertError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
