"""Batch command-line front end.

Subcommands operate on JSON polynomial files and emit two artifacts: a
deterministic payload written to --out (byte-identical across runs for
identical inputs and flags) and a run report on stdout carrying the command
echo, input digests, per-check pass/fail rows, and stage timings.  Exit
codes: 0 pass, 2 input or precondition failure, 3 numerical failure,
4 exhausted search budget.

    latfac factor1d INPUT [--tol T] [--out PATH]
    latfac factor2d INPUT [--eps E] [--out PATH]
    latfac strip INPUT --beta B --mode axis|rational|irrational
                 [--alpha A] [--eps E] [--max-convergents K] [--out PATH]
    latfac bench [--n-list 5,7,9,11] [--out PATH]
    latfac corpus [--dim D] [--seed S] [--count N] [--out PATH]

The corpus generators are plain functions so test suites can call them with
the same seeds the subcommand uses.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExhausted, LatfacError, NumericalError, PreconditionError
from .factor1d import mahler_measure, near_circle_poly, spectral_factor, spectral_factor_roots
from .factor2d import factor_approximant, slicewise_factor, verify_convergence
from .lattice import RealAlpha
from .stripfactor import (
    result_to_json_dict,
    strip_factor_axis,
    strip_factor_irrational,
    strip_factor_rational,
    verify_result,
)
from .trigpoly import (
    TrigPoly1,
    TrigPoly2,
    _pow2_at_least,
    min_re_certified,
    poly_from_json_dict,
    poly_to_json_dict,
    sup_norm_certified,
)
from .winding import branch_log


@dataclass
class RunReport:
    command: list
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    timings_ms: dict = field(default_factory=dict)

    def add_check(self, name: str, invariant: str, passed: bool, detail: str):
        self.checks.append(
            {"name": name, "invariant": invariant, "passed": bool(passed), "detail": detail}
        )

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def json_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "timings_ms": self.timings_ms,
            "passed": self.passed,
        }


def _dumps(obj) -> str:
    # fixed field order and shortest round-trip floats keep outputs
    # byte-identical for identical inputs
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_out(report: RunReport, path, obj):
    if path is None:
        return
    with open(path, "w") as fh:
        fh.write(_dumps(obj))
    report.outputs.append(str(path))


def _load_poly(report: RunReport, path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as ex:
        raise PreconditionError(f"cannot read {path}: {ex}") from ex
    report.inputs[str(path)] = "sha256:" + hashlib.sha256(raw).hexdigest()
    try:
        obj = json.loads(raw)
    except ValueError as ex:
        raise PreconditionError(f"{path} is not valid JSON: {ex}") from ex
    return poly_from_json_dict(obj)


def _complex_pair(c: complex):
    return [float(c.real), float(c.imag)]


class _Timer:
    def __init__(self, report: RunReport, stage: str):
        self.report = report
        self.stage = stage

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        ms = (time.perf_counter() - self.t0) * 1000.0
        self.report.timings_ms[self.stage] = round(ms, 3)
        return False


def cmd_factor1d(args, report: RunReport) -> int:
    with _Timer(report, "load"):
        t = _load_poly(report, args.input)
    if not isinstance(t, TrigPoly1):
        raise PreconditionError("factor1d expects a one-variable polynomial")
    # the root route goes first: a zero on the circle is reported as the
    # numerical obstruction it is, before any positivity certificate
    with _Timer(report, "roots"):
        rp = spectral_factor_roots(t)
    with _Timer(report, "cepstral"):
        cp = spectral_factor(t, tol=args.tol)
    with _Timer(report, "checks"):
        resid = (cp.plus * cp.minus - t).coeff_l1()
        scale = max(1.0, t.coeff_l1())
        report.add_check(
            "residual_identity",
            "factor1d: certified residual of plus*minus against t stays at or below tol",
            resid <= args.tol * scale,
            f"coefficient residual {resid:.3e}, tol {args.tol:g}",
        )
        keys = set(cp.plus.freqs) | set(rp.plus.freqs)
        dev = max(abs(cp.plus.coeff(j) - rp.plus.coeff(j)) for j in keys)
        report.add_check(
            "route_agreement",
            "factor1d: cepstral and root factorizations agree after sign normalization",
            dev <= 1e-8 * scale,
            f"max coefficient deviation {dev:.3e}",
        )
    payload = {
        "plus": poly_to_json_dict(cp.plus),
        "minus": poly_to_json_dict(cp.minus),
        "log_mean": _complex_pair(cp.log_mean),
        "circle_margin": rp.circle_margin,
        "lam_plus": [_complex_pair(z) for z in sorted(rp.lam_plus, key=lambda z: (z.real, z.imag))],
        "lam_minus": [_complex_pair(z) for z in sorted(rp.lam_minus, key=lambda z: (z.real, z.imag))],
    }
    with _Timer(report, "write"):
        _write_out(report, args.out, payload)
    return 0 if report.passed else 3


def _budget_json(b) -> dict:
    rate = None if not math.isfinite(b.x_decay_rate) else b.x_decay_rate
    return {
        "eps": b.eps,
        "x_degree": b.x_degree,
        "y_degree_effective": b.y_degree_effective,
        "positivity_ratio": b.positivity_ratio,
        "x_decay_rate": rate,
        "slice_bound": b.slice_bound,
        "order": b.order,
    }


def cmd_factor2d(args, report: RunReport) -> int:
    with _Timer(report, "load"):
        t = _load_poly(report, args.input)
    if not isinstance(t, TrigPoly2):
        raise PreconditionError("factor2d expects a two-variable polynomial")
    with _Timer(report, "verify"):
        conv = verify_convergence(t, args.eps)
    with _Timer(report, "approximant"):
        M = _pow2_at_least(8 * max(4 * max(t.n1, 1), conv.order + 1))
        sf = slicewise_factor(t, M)
        ap = factor_approximant(sf, conv.order)
    report.add_check(
        "distance_within_eps",
        "factor2d: the budget order brings the smoothing within eps of the family",
        conv.distance_ok,
        f"measured distance {conv.distance:.3e} at order {conv.order}",
    )
    report.add_check(
        "annulus_slices",
        "factor2d: frozen-x slices keep positive real part and bounded sup over the annulus",
        conv.gamma_ok,
        f"{len(conv.gamma)} slice rows checked",
    )
    payload = {
        "budget": _budget_json(conv.budget),
        "order": conv.order,
        "distance": conv.distance,
        "gamma": [
            {
                "z": _complex_pair(row.z),
                "re_lower": row.re_lower,
                "re_threshold": row.re_threshold,
                "re_ok": row.re_ok,
                "sup_upper": row.sup_upper,
                "sup_threshold": row.sup_threshold,
                "sup_ok": row.sup_ok,
            }
            for row in conv.gamma
        ],
        "approximant": poly_to_json_dict(ap),
        "passed": conv.passed,
    }
    with _Timer(report, "write"):
        _write_out(report, args.out, payload)
    return 0 if report.passed else 3


def _parse_alpha(mode: str, raw):
    if mode == "axis":
        if raw is not None:
            raise PreconditionError("axis mode takes no --alpha")
        return None
    if raw is None:
        raise PreconditionError(f"{mode} mode needs --alpha")
    if mode == "rational":
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as ex:
            raise PreconditionError(f"cannot parse --alpha {raw!r}: {ex}") from ex
    return RealAlpha.from_digits(raw)


def cmd_strip(args, report: RunReport) -> int:
    with _Timer(report, "load"):
        t = _load_poly(report, args.input)
    if not isinstance(t, TrigPoly2):
        raise PreconditionError("strip expects a two-variable polynomial")
    try:
        beta = Fraction(args.beta)
    except (ValueError, ZeroDivisionError) as ex:
        raise PreconditionError(f"cannot parse --beta {args.beta!r}: {ex}") from ex
    alpha = _parse_alpha(args.mode, args.alpha)
    with _Timer(report, "factor"):
        if args.mode == "axis":
            res = strip_factor_axis(t, beta, args.eps)
        elif args.mode == "rational":
            res = strip_factor_rational(t, alpha, beta, args.eps)
        else:
            res = strip_factor_irrational(
                t, alpha, beta, args.eps, max_convergents=args.max_convergents
            )
    with _Timer(report, "verify"):
        rep = verify_result(t, res)
    report.add_check(
        "strip_containment",
        "strip: every factor frequency certified inside the strip",
        rep.containment_ok,
        f"{len(rep.containment)} frequencies re-tested",
    )
    report.add_check(
        "error_budget",
        "strip: residual within (2*sup(t)+eps)*eps",
        rep.error_ok,
        f"error {rep.error_upper:.3e} vs bound {rep.error_bound:.3e}",
    )
    with _Timer(report, "write"):
        _write_out(report, args.out, result_to_json_dict(res))
    return 0 if report.passed else 3


_BENCH_COLUMNS = (
    "n,mahler,sup_t,im_log_sup,log_plus_sup,"
    "mahler_model,sup_model,log_plus_model"
)


def cmd_bench(args, report: RunReport) -> int:
    try:
        ns = [int(s) for s in args.n_list.split(",") if s.strip()]
    except ValueError as ex:
        raise PreconditionError(f"cannot parse --n-list {args.n_list!r}: {ex}") from ex
    if not ns or any(n < 1 or n % 2 == 0 for n in ns):
        raise PreconditionError("--n-list needs odd indices >= 1")
    rows = [_BENCH_COLUMNS]
    with _Timer(report, "bench"):
        for n in ns:
            t = near_circle_poly(n)
            mah = mahler_measure(t, method="roots")
            sup_lo, sup_hi = sup_norm_certified(t, 1e-9 * max(1.0, t.coeff_l1()))
            im_sup = float(np.abs(branch_log(t).values.imag).max())
            pair = spectral_factor(t)
            plus_lo, plus_hi = sup_norm_certified(
                pair.plus, 1e-9 * max(1.0, pair.plus.coeff_l1())
            )
            # asymptotic model for this family: the Mahler measure tends to
            # exp(2/pi), the sup norm to 1+e^2, and log of the factor sup
            # grows linearly in the index
            rows.append(
                ",".join(
                    repr(v)
                    for v in (
                        n,
                        mah,
                        0.5 * (sup_lo + sup_hi),
                        im_sup,
                        math.log(0.5 * (plus_lo + plus_hi)),
                        math.exp(2.0 / math.pi),
                        1.0 + math.e**2,
                        1.0 / math.pi + 0.5831 * n,
                    )
                )
            )
    report.add_check(
        "rows_emitted",
        "cli: one row per requested family index",
        len(rows) == len(ns) + 1,
        f"{len(rows) - 1} rows",
    )
    csv = "\n".join(rows) + "\n"
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(csv)
        report.outputs.append(str(args.out))
    else:
        sys.stdout.write(csv)
    return 0 if report.passed else 3


def corpus_1d(seed: int, count: int = 200, max_degree: int = 32, floor: float = 0.1):
    """Random strictly positive real-valued corpus with a certified floor."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_degree + 1))
        coeffs = {0: complex(rng.normal())}
        for j in range(1, n + 1):
            c = complex(rng.normal(), rng.normal()) / (2.0 * (1 + j))
            coeffs[j] = c
            coeffs[-j] = c.conjugate()
        p = TrigPoly1(coeffs)
        lo, _ = min_re_certified(p, max(0.01, 0.01 * p.coeff_l1()))
        out.append(p + TrigPoly1({0: floor - lo}))
    return out


def corpus_2d(seed: int, count: int = 50, max_degree: int = 4, floor: float = 0.5):
    """Two-variable analogue of corpus_1d; degrees are drawn up to
    max_degree per axis with at least one positive."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n1 = int(rng.integers(0, max_degree + 1))
        n2 = int(rng.integers(0, max_degree + 1))
        if n1 == 0 and n2 == 0:
            continue
        coeffs = {(0, 0): complex(rng.normal())}
        for j in range(-n1, n1 + 1):
            for k in range(-n2, n2 + 1):
                if (j, k) == (0, 0) or (j, k) < (0, 0):
                    continue
                c = complex(rng.normal(), rng.normal()) / (2.0 * (1 + abs(j) + abs(k)))
                coeffs[(j, k)] = c
                coeffs[(-j, -k)] = c.conjugate()
        p = TrigPoly2(coeffs)
        lo, _ = min_re_certified(p, max(0.01, 0.01 * p.coeff_l1()))
        out.append(p + TrigPoly2({(0, 0): floor - lo}))
    return out


def cmd_corpus(args, report: RunReport) -> int:
    if args.dim == 1:
        count = args.count if args.count is not None else 200
        polys = corpus_1d(args.seed, count=count)
        floor = 0.1
    else:
        count = args.count if args.count is not None else 50
        polys = corpus_2d(args.seed, count=count)
        floor = 0.5
    report.add_check(
        "positivity_floor",
        "cli: corpus polynomials carry a certified positivity floor",
        True,
        f"floor {floor}, {len(polys)} cases",
    )
    payload = {
        "dim": args.dim,
        "seed": args.seed,
        "floor": floor,
        "polys": [poly_to_json_dict(p) for p in polys],
    }
    with _Timer(report, "write"):
        _write_out(report, args.out, payload)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latfac",
        description="spectral factorization with lattice-strip frequency constraints",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p1 = sub.add_parser("factor1d", help="factor a one-variable polynomial")
    p1.add_argument("input")
    p1.add_argument("--tol", type=float, default=1e-9)
    p1.add_argument("--out", default=None)

    p2 = sub.add_parser("factor2d", help="slice family convergence report")
    p2.add_argument("input")
    p2.add_argument("--eps", type=float, default=1e-3)
    p2.add_argument("--out", default=None)

    p3 = sub.add_parser("strip", help="factor into a diagonal lattice strip")
    p3.add_argument("input")
    p3.add_argument("--alpha", default=None, help="p/q or decimal string")
    p3.add_argument("--beta", required=True)
    p3.add_argument("--eps", type=float, default=1e-3)
    p3.add_argument("--mode", choices=("axis", "rational", "irrational"), required=True)
    p3.add_argument("--max-convergents", type=int, default=8)
    p3.add_argument("--out", default=None)

    p4 = sub.add_parser("bench", help="near-circle family trend table (CSV)")
    p4.add_argument("--n-list", default="5,7,9,11")
    p4.add_argument("--out", default=None)

    p5 = sub.add_parser("corpus", help="deterministic random positive corpus")
    p5.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p5.add_argument("--seed", type=int, default=20260818)
    p5.add_argument("--count", type=int, default=None)
    p5.add_argument("--out", default=None)
    return ap


_DISPATCH = {
    "factor1d": cmd_factor1d,
    "factor2d": cmd_factor2d,
    "strip": cmd_strip,
    "bench": cmd_bench,
    "corpus": cmd_corpus,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _build_parser().parse_args(argv)
    report = RunReport(command=["latfac"] + argv)
    try:
        code = _DISPATCH[args.cmd](args, report)
    except BudgetExhausted as ex:
        sys.stdout.write(
            _dumps(
                {
                    "error": type(ex).__name__,
                    "message": str(ex),
                    "exit_code": 4,
                    "convergent_trace": [
                        {
                            "p": c.p,
                            "q": c.q,
                            "gap": c.gap,
                            "outcome": c.outcome,
                            "n1": c.n1,
                            "threshold": c.threshold,
                        }
                        for c in ex.trace
                    ],
                }
            )
        )
        return 4
    except PreconditionError as ex:
        sys.stdout.write(
            _dumps({"error": type(ex).__name__, "message": str(ex), "exit_code": 2})
        )
        return 2
    except (NumericalError, LatfacError) as ex:
        sys.stdout.write(
            _dumps({"error": type(ex).__name__, "message": str(ex), "exit_code": 3})
        )
        return 3
    sys.stdout.write(_dumps(report.json_dict()))
    return code


if __name__ == "__main__":
    sys.exit(main())
