"""Command-line front end.

Exit codes: 0 success, 2 bad input or arguments, 3 internal cross-check
failure, 4 construction precondition not met.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, _tol
from .dataset import Dataset, dump_dataset, load_dataset
from .errors import InvalidDataset, PreconditionFailed, TooLarge
from .generators import generate_cobb_douglas_dataset, generate_quasilinear_dataset
from .graph import DEFAULT_CYCLE_CAP
from .indices import full_report
from .lp import solve_afriat_lp
from .pump import BRUTE_FORCE_MAX_T, tmp, tmp_bruteforce, tmp_constrained
from .utility import (
    build_constrained_rationalizer,
    build_optimal_permutation_rationalizer,
    build_quasilinear_rationalizer,
    verify_quasilinear,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3
EXIT_PRECONDITION = 4
ORACLE_TOL = 1e-6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _money(v: float | None) -> str:
    return "n/a" if v is None else f"{v:.6f}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace) -> Dataset:
    path = args.input_opt or args.input
    if path is None:
        raise CliError("no input file given", EXIT_INPUT)
    try:
        return load_dataset(path, args.format)
    except FileNotFoundError:
        raise CliError(f"input file not found: {path}", EXIT_INPUT)
    except IsADirectoryError:
        raise CliError(f"input path is a directory: {path}", EXIT_INPUT)
    except InvalidDataset as exc:
        raise CliError(f"invalid dataset: {exc}", EXIT_INPUT)


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _witness(exc: PreconditionFailed) -> str:
    if exc.witness is None:
        return ""
    return " (witness cycle " + ",".join(str(n + 1) for n in exc.witness.nodes) + ")"


# ---------------------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    d = _load(args)
    report = full_report(d, cycle_cap=args.cycle_cap, samples=args.samples, seed=args.seed)
    if args.json:
        text = _dumps(report.to_dict())
    else:
        r = report
        trunc = " (truncated)" if r.cycles_truncated else ""
        rows = [
            ("observations", str(r.T)),
            ("goods", str(r.L)),
            ("GARP", "satisfied" if r.garp else "violated"),
            ("cyclical monotonicity", "satisfied" if r.cm else "violated"),
            ("TMP = A = Q", _money(r.tmp)),
            ("TMP_c = A_c = Q_c", _money(r.tmp_c)),
            ("epsilon_bar (LP)", _money(r.epsilon_bar)),
            ("epsilon_bar_c (LP)", _money(r.epsilon_bar_c)),
            ("ELS mean" + trunc, _money(r.els_mean)),
            ("ELS median" + trunc, _money(r.els_median)),
            ("SCSD max" + trunc, _money(r.scsd_max)),
            ("GARP violations", str(len(r.cycles))),
            ("CCEI waste", _money(r.ccei_waste)),
            ("CCEI efficiency", _money(r.ccei_efficiency)),
            ("A normalized", _money(r.a_tilde)),
        ]
        width = max(len(k) for k, _ in rows)
        lines = [f"{k:<{width}}  {v}" for k, v in rows]
        lines.append("cross-checks:")
        for c in r.cross_checks:
            lines.append(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: |delta| = {c.delta:.3g}")
        for name, cert in r.certificates.items():
            lines.append(f"  [{'PASS' if cert.passed else 'FAIL'}] {name} attaining utility certificate")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if not report.consistent:
        print("error: internal cross-check failed beyond tolerance", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_rationalize(args: argparse.Namespace) -> int:
    d = _load(args)
    try:
        if args.optimal_permutation:
            opt = build_optimal_permutation_rationalizer(d, args.constrained)
            utility, target = opt.utility, opt.permuted
            extra = {"gap": opt.gap, "permutation": [s + 1 for s in opt.pump.permutation]}
        elif args.constrained:
            utility, target, extra = build_constrained_rationalizer(d), d, {}
        else:
            utility, target, extra = build_quasilinear_rationalizer(d), d, {}
    except PreconditionFailed as exc:
        print(f"error: {exc}{_witness(exc)}", file=sys.stderr)
        return EXIT_PRECONDITION
    cert = verify_quasilinear(utility, target, args.constrained, args.samples, args.seed)
    doc = utility.to_dict()
    doc.update(extra)
    doc["certificate"] = cert.to_dict()
    _emit(_dumps(doc), args.out)
    print(cert.summary(), file=sys.stderr if args.out is None else sys.stdout)
    return EXIT_OK if cert.passed else EXIT_INTERNAL


def cmd_generate(args: argparse.Namespace) -> int:
    if args.T is None or args.L is None:
        raise CliError("--T and --L are required", EXIT_INPUT)
    if args.T < 1 or args.L < 1:
        raise CliError("--T and --L must be at least 1", EXIT_INPUT)
    if args.model == "quasilinear":
        d = generate_quasilinear_dataset(args.seed, args.T, args.L)
    else:
        d = generate_cobb_douglas_dataset(args.seed, args.T, args.L)
    fmt = args.format or (Path(args.out).suffix.lstrip(".").lower() if args.out else "csv")
    if fmt not in ("csv", "json"):
        fmt = "csv"
    _emit(dump_dataset(d, fmt), args.out)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    d = _load(args)
    if d.T > BRUTE_FORCE_MAX_T:
        raise CliError(f"oracle needs T <= {BRUTE_FORCE_MAX_T}, got T = {d.T}", EXIT_INPUT)
    rows = []
    for constrained, solve, name in ((False, tmp, "TMP"), (True, tmp_constrained, "TMP_c")):
        assigned = solve(d).value
        try:
            brute = tmp_bruteforce(d, constrained).value
        except TooLarge as exc:  # pragma: no cover - guarded above
            raise CliError(str(exc), EXIT_INPUT)
        lp = solve_afriat_lp(d, constrained).epsilon_bar
        rows.append((name, assigned, brute, lp))
    worst = 0.0
    lines = [f"{'index':<6} {'assignment':>14} {'brute force':>14} {'LP':>14} {'|a-b|':>10} {'|a-lp|':>10}"]
    for name, a, b, lp in rows:
        worst = max(worst, abs(a - b), abs(a - lp))
        lines.append(f"{name:<6} {a:>14.9f} {b:>14.9f} {lp:>14.9f} {abs(a - b):>10.2e} {abs(a - lp):>10.2e}")
    lines.append(f"max delta {worst:.3e} ({'ok' if worst <= ORACLE_TOL else 'MISMATCH'})")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if worst <= ORACLE_TOL else EXIT_INTERNAL


def cmd_pump(args: argparse.Namespace) -> int:
    d = _load(args)
    result = tmp_constrained(d) if args.constrained else tmp(d)
    if args.json:
        text = _dumps(result.to_dict())
    else:
        name = "TMP_c" if args.constrained else "TMP"
        perm = " ".join(str(s + 1) for s in result.permutation)
        text = f"{name} = {_money(result.value)}\npermutation: {perm}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_lp(args: argparse.Namespace) -> int:
    d = _load(args)
    sol = solve_afriat_lp(d, args.constrained)
    if args.json:
        text = _dumps(sol.to_dict())
    else:
        name = "epsilon_bar_c" if args.constrained else "epsilon_bar"
        lines = [f"{name} = {_money(sol.epsilon_bar)}", "t  u_t  eps_t"]
        lines += [f"{t + 1}  {_money(u)}  {_money(e)}" for t, (u, e) in enumerate(zip(sol.u, sol.eps))]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="dataset file (CSV or JSON)")
    p.add_argument("-i", "--input", dest="input_opt", help="dataset file (alternative to the positional form)")
    p.add_argument("--format", choices=("csv", "json"), help="input format (default: from suffix)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable JSON output")
    p.add_argument("--out", help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pumpkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute every index and cross-check")
    _add_input(p)
    _add_common(p)
    p.add_argument("--cycle-cap", type=int, default=DEFAULT_CYCLE_CAP)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("rationalize", help="construct and certify a rationalizing utility")
    _add_input(p)
    p.add_argument("--out", help="write the utility JSON to PATH")
    p.add_argument("--constrained", action="store_true", help="budget-constrained construction")
    p.add_argument("--optimal-permutation", action="store_true", help="utility attaining the inefficiency index")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rationalize)

    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--model", choices=("quasilinear", "cobb-douglas"), default="quasilinear")
    p.add_argument("--T", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", help="compare assignment, brute force and LP values")
    _add_input(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    for name, helptext, func in (
        ("pump", "money pump value and optimal permutation", cmd_pump),
        ("lp", "slack LP value and solution", cmd_lp),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_input(p)
        _add_common(p)
        p.add_argument("--constrained", action="store_true")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _tol.tol_num()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
