"""Command-line entry point. Exit codes: 0 YES/PASS, 1 NO, 2 error."""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Callable

from . import analysis, cspat, oracle, solver
from .expr import ExprError, gen_random_instance, parse_instance, realize, render_instance
from .pattern import PatternError, complete_rep, enumerate_patterns

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2
CHECKS = ("rank", "triangular", "basis", "kronecker", "representation")
CHECK_CAPS = {"rank": 5, "triangular": analysis.TRIANGULAR_CAP, "basis": analysis.BASIS_CAP,
              "kronecker": 4, "representation": 2}


class CliError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    report = solver.solve(inst, repeats=args.repeats, seed=args.seed, jobs=args.jobs,
                          mem_cap_mb=args.mem_cap)
    print(report.line())
    return EXIT_YES if report.yes else EXIT_NO


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = _load(args.file)
    if inst.n > oracle.BRUTE_CAP:
        raise CliError(f"oracle supports at most {oracle.BRUTE_CAP} vertices, got {inst.n}")
    b = oracle.min_steiner(inst)
    if b is None:
        print("NO exact=true")
        return EXIT_NO
    print(f"YES size={b} exact=true")
    return EXIT_YES


def cmd_realize(args: argparse.Namespace) -> int:
    sys.stdout.write(realize(_load(args.file).expr).export())
    return EXIT_YES


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        inst = gen_random_instance(args.n, args.k, args.terminals, args.seed, budget=args.budget)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    text = render_instance(inst)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return EXIT_YES


def _run_check(name: str, k: int) -> tuple[bool, str]:
    if name == "rank":
        m = analysis.consistency_matrix(*analysis.preset("fig1", k))
        r = analysis.gf2_rank(m)
        return r == 4 ** k, f"rank(M_B)={r}"
    if name == "triangular":
        return analysis.check_triangular_cs(k), f"triangular(M_CS) dim={3 ** k}"
    if name == "basis":
        return analysis.check_cs_basis(k), f"basis(CS) k={k}"
    if name == "kronecker":
        return analysis.check_kronecker(k), f"kronecker(M_B) dim={4 ** k}"
    pats = enumerate_patterns(k)
    ok = all(oracle.check_representation(complete_rep(p), [p], k, pats) for p in pats)
    return ok, f"representation(R_p) patterns={len(pats)}"


def cmd_analyze(args: argparse.Namespace) -> int:
    checks = args.check or list(CHECKS)
    for name in checks:
        if not 1 <= args.k <= CHECK_CAPS[name]:
            raise CliError(f"check {name} supports k in [1, {CHECK_CAPS[name]}], got {args.k}")
    all_ok = True
    for name in checks:
        ok, text = _run_check(name, args.k)
        print(f"{text} {'PASS' if ok else 'FAIL'}")
        all_ok &= ok
    return EXIT_YES if all_ok else EXIT_NO


def _selftests(quick: bool) -> list[tuple[str, Callable[[], bool]]]:
    kmax = 2 if quick else 3
    fuzz = 10 if quick else 50

    def figures() -> bool:
        f1 = analysis.consistency_matrix(*analysis.preset("fig1")).to_lists()
        f2 = analysis.consistency_matrix(*analysis.preset("fig2")).to_lists()
        return f1 == [list(r) for r in analysis.FIG1] and f2 == [list(r) for r in analysis.FIG2]

    def ranks() -> bool:
        return all(analysis.gf2_rank(analysis.consistency_matrix(*analysis.preset("fig1", k)))
                   == 4 ** k for k in range(1, kmax + 1))

    def triangular() -> bool:
        return all(analysis.check_triangular_cs(k) for k in range(1, kmax + 2))

    def basis() -> bool:
        return all(analysis.check_cs_basis(k) for k in range(1, kmax + 1))

    def transforms() -> bool:
        rng = random.Random(0)
        for k in range(1, 5):
            for _ in range(10):
                a = cspat.Gf2Table(k, rng.getrandbits(3 ** k))
                b = cspat.Gf2Table(k, rng.getrandbits(3 ** k))
                if cspat.join_product(a, b) != cspat.naive_join_product(a, b):
                    return False
                if cspat.mobius(cspat.zeta(a)) != a:
                    return False
        return True

    def soundness() -> bool:
        for seed in range(fuzz):
            rng = random.Random(seed)
            n = rng.randint(1, 7)
            inst = gen_random_instance(n, rng.randint(1, 3), rng.randint(1, n), seed)
            truth = oracle.min_steiner(inst)
            got = solver.solve(inst, repeats=4, seed=seed).answer
            if got is not None and (truth is None or got < truth):
                return False
        return True

    def parity() -> bool:
        checked = 0
        for seed in range(10 * fuzz):
            rng = random.Random(seed)
            n = rng.randint(1, 5)
            inst = gen_random_instance(n, rng.randint(1, 3), rng.randint(1, n), seed)
            if len(inst.nodes) > oracle.DREP_CAP_NODES:
                continue
            wa = solver.sample_weights(inst, seed)
            root = solver.run_dp(inst, wa)
            got = {key: frozenset(cspat.tau_inv(x, inst.k) for x in range(3 ** inst.k) if t >> x & 1)
                   for key, t in root.as_dict().items()}
            if got != oracle.naive_bas_root(inst, wa):
                return False
            checked += 1
            if checked >= fuzz // 2:
                break
        return True

    return [("figures", figures), ("rank", ranks), ("triangular", triangular), ("basis", basis),
            ("transforms", transforms), ("soundness", soundness), ("parity", parity)]


def cmd_selftest(args: argparse.Namespace) -> int:
    tests = _selftests(args.quick)
    passed = 0
    for name, fn in tests:
        ok = fn()
        passed += ok
        print(f"selftest {name} {'PASS' if ok else 'FAIL'}")
    print(f"selftest {passed}/{len(tests)} {'PASS' if passed == len(tests) else 'FAIL'}")
    return EXIT_YES if passed == len(tests) else EXIT_ERROR


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cwsteiner", description="Steiner tree on k-clique-expressions")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="randomized solver")
    p.add_argument("file")
    p.add_argument("--repeats", type=_positive, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--mem-cap", type=float, default=None, metavar="MB")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact brute force")
    p.add_argument("file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("realize", help="print the realized graph")
    p.add_argument("file")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("analyze", help="consistency-matrix checks")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check", action="append", choices=CHECKS)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gen", help="random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--terminals", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_YES
    try:
        return args.func(args)
    except (CliError, ExprError, PatternError, oracle.OracleCapError, solver.ResourceError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
