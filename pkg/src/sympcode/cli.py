"""Command-line front end: verify, fidelity, distill, exponent, codegen.

JSON goes to stdout or ``--out``; sweep tables go to ``--csv``.  Exit status is
0 when every check passed, 1 when a check failed, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import logging
import sys

import numpy as np

from . import channels as ch
from . import io
from .codes import build_code
from .distill import iterate_two_way, werner_distribution
from .exponent import exponent_both, threshold_rate
from .fidelity import CHANNEL_TOL, WEYL_TOL, fe_pauli_closed_form, theorem1_check
from .fflin import PreconditionError
from .suites import SUITES, run

log = logging.getLogger("sympcode")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class ConfigError(ValueError):
    pass


def _emit(obj, out) -> None:
    text = io.dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows) -> None:
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def _parse_sweep(spec: str) -> np.ndarray:
    """'start:stop:step' inclusive of stop, or a comma list."""
    if ":" in spec:
        a, b, c = (float(t) for t in spec.split(":"))
        count = int(round((b - a) / c)) + 1
        return np.round(a + c * np.arange(count), 12)
    return np.array([float(t) for t in spec.split(",")])


def cmd_verify(args) -> int:
    report = run(args.suite, args.seed, d=args.d, n=args.n, k=args.k, count=args.seeds)
    _emit(report, args.out)
    for s in report["suites"]:
        log.info("%-13s %s  max discrepancy %.3g", s["suite"], "pass" if s["passed"] else "FAIL", s["max_discrepancy"])
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _load_code_arg(args, distribution=None):
    if args.code:
        code = io.load_code(args.code)
    elif args.L:
        L = io.load_subspace(args.L)
        code = build_code(L, seed=args.seed, transversal=args.transversal, distribution=distribution)
    else:
        raise ConfigError("give --code or --L")
    if code.transversal is None:
        code = build_code(code.L, seed=args.seed, frame=code.frame, transversal="lexicographic")
    return code


def _check_dims(code, d, n, what):
    if (code.d, code.n) != (d, n):
        raise ConfigError(f"{what} acts on d={d}, n={n} but the code has d={code.d}, n={code.n}")


def cmd_fidelity(args) -> int:
    sources = sum(x is not None for x in (args.channel, args.dist, args.bit_flip, args.sweep))
    if sources != 1:
        raise ConfigError("give exactly one of --channel, --dist, --bit-flip, --sweep")
    if args.sweep is not None:
        code = _load_code_arg(args)
        if code.d != 2:
            raise ConfigError("the bit-flip sweep needs a qubit code")
        rows, worst = [], 0.0
        for p in _parse_sweep(args.sweep):
            rep = fe_pauli_closed_form(code, ch.bit_flip_distribution(code.n, float(p)))
            worst = max(worst, rep.discrepancy)
            rows.append([f"{p:.12g}", repr(rep.simulated), repr(rep.formula), repr(rep.discrepancy)])
        if args.csv:
            _write_csv(args.csv, ["p", "simulated", "formula", "discrepancy"], rows)
        _emit({"rows": len(rows), "max_discrepancy": worst, "passed": worst <= WEYL_TOL}, args.out)
        return EXIT_OK if worst <= WEYL_TOL else EXIT_FAIL
    if args.channel:
        B = io.load_channel(args.channel)
        code = _load_code_arg(args)
        _check_dims(code, B.d, B.n, "channel")
        rep, tol = theorem1_check(code, B), CHANNEL_TOL
    else:
        P = io.load_distribution(args.dist) if args.dist else None
        code = _load_code_arg(args, P)
        if P is None:
            P = ch.bit_flip_distribution(code.n, args.bit_flip)
            if code.d != 2:
                raise ConfigError("--bit-flip needs a qubit code")
        _check_dims(code, P.d, P.m, "distribution")
        rep, tol = fe_pauli_closed_form(code, P), WEYL_TOL
    out = rep.to_dict()
    out["tolerance"] = tol
    out["passed"] = rep.ok(tol)
    _emit(out, args.out)
    return EXIT_OK if rep.ok(tol) else EXIT_FAIL


def cmd_distill(args) -> int:
    if args.input_werner is not None:
        P0 = werner_distribution(args.input_werner, args.d or 2)
    elif args.dist:
        P0 = io.load_distribution(args.dist)
    else:
        raise ConfigError("give --input-werner or --dist")
    final = io.load_code(args.final_code) if args.final_code else None
    traj = iterate_two_way(P0, args.rounds, accept=tuple(args.accept), twirl=args.twirl, final_code=final)
    _emit({"input": P0.to_dict(), "accept": args.accept, "twirl": args.twirl, "trajectory": traj}, args.out)
    return EXIT_OK


def _exponent_record(R, P, m):
    both = exponent_both(R, P, m)
    return {
        "rate": R,
        "value": both["result"].value,
        "threshold": threshold_rate(P, m),
        "argmin": both["result"].argmin_Q.to_dict(),
        "method": both["result"].method,
        "line_value": both["line"].value,
        "grid_value": both["grid"].value,
        "method_gap": both["gap"],
        "method_agreement": both["agree"],
    }


def cmd_exponent(args) -> int:
    P = io.load_distribution(args.dist)
    m = args.m or P.m
    if args.rate_sweep:
        rates = _parse_sweep(args.rate_sweep)
        recs = [_exponent_record(float(R), P, m) for R in rates]
        if args.csv:
            _write_csv(
                args.csv,
                ["rate", "value", "threshold", "line_value", "grid_value", "method_agreement"],
                [
                    [f"{r['rate']:.12g}", repr(r["value"]), repr(r["threshold"]), repr(r["line_value"]),
                     repr(r["grid_value"]), r["method_agreement"]]
                    for r in recs
                ],
            )
        _emit({"records": recs}, args.out)
        return EXIT_OK if all(r["method_agreement"] for r in recs) else EXIT_FAIL
    if args.rate is None:
        raise ConfigError("give --rate or --rate-sweep")
    rec = _exponent_record(args.rate, P, m)
    _emit(rec, args.out)
    return EXIT_OK if rec["method_agreement"] else EXIT_FAIL


def cmd_codegen(args) -> int:
    L = io.load_subspace(args.L)
    P = io.load_distribution(args.dist) if args.dist else None
    code = build_code(L, seed=args.seed, transversal=args.transversal, distribution=P)
    _emit(io.code_to_json(code, vectors=not args.no_vectors, seed=args.seed), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sympcode", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="write JSON here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")

    p = sub.add_parser("verify", help="run seeded identity suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--d", type=int, help="restrict to this modulus")
    p.add_argument("--n", type=int, help="restrict to this number of digits")
    p.add_argument("--k", type=int, help="restrict to this number of logical digits")
    p.add_argument("--seeds", type=int, help="random instances per case (suite default if omitted)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fidelity", help="entanglement fidelity of a code under a channel")
    p.add_argument("--code", help="code bundle JSON")
    p.add_argument("--L", help="L-basis JSON (code built on the fly)")
    p.add_argument("--channel", help="Kraus channel JSON")
    p.add_argument("--dist", help="Weyl error distribution JSON")
    p.add_argument("--bit-flip", type=float, help="independent bit-flip probability per qubit")
    p.add_argument("--sweep", help="bit-flip sweep 'start:stop:step', e.g. 0:0.5:0.05")
    p.add_argument("--csv", help="CSV path for the sweep table")
    p.add_argument("--transversal", choices=["auto", "lexicographic", "most_likely"], default="auto")
    common(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("distill", help="two-way recurrence trajectory")
    p.add_argument("--input-werner", type=float, help="Werner fidelity of the input pairs")
    p.add_argument("--dist", help="single-pair Bell-diagonal distribution JSON")
    p.add_argument("--d", type=int, help="modulus for --input-werner (default 2)")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--accept", type=int, nargs="+", default=[0], help="accepted relative syndromes")
    p.add_argument("--twirl", choices=["isotropic", "weyl"], default="isotropic")
    p.add_argument("--final-code", help="code bundle for a final one-way stage")
    common(p, seed=False)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("exponent", help="random-coding exponent E_m(R, P)")
    p.add_argument("--dist", required=True, help="distribution JSON")
    p.add_argument("--m", type=int, help="block length in digits (default: the distribution's m)")
    p.add_argument("--rate", type=float)
    p.add_argument("--rate-sweep", help="'start:stop:step' or comma list")
    p.add_argument("--method", choices=["both"], default="both", help="both methods are always run and compared")
    p.add_argument("--csv", help="CSV path for the rate sweep")
    common(p, seed=False)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("codegen", help="build a code bundle from an L basis")
    p.add_argument("--L", required=True, help="L-basis JSON")
    p.add_argument("--dist", help="distribution for the most_likely transversal")
    p.add_argument("--transversal", choices=["auto", "lexicographic", "most_likely"], default="auto")
    p.add_argument("--no-vectors", action="store_true", help="omit basis vectors (rebuilt from the seed on load)")
    common(p)
    p.set_defaults(func=cmd_codegen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"sympcode: error: no such file: {exc.filename}", file=sys.stderr)
    except (io.ParseError, ConfigError, PreconditionError, ch.DimensionGuardError) as exc:
        print(f"sympcode: error: {exc}", file=sys.stderr)
    except json.JSONDecodeError as exc:
        print(f"sympcode: error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
