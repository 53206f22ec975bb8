"""Command-line entry point: ``hardlab <command> ...``.

Exit codes: 0 success, 1 a verification failed (or a solve timed out),
2 usage error. Every report carries ``schema_version``.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import FIXTURES, __version__
from .gadget_core import GadgetFormatError
from .graph_core import Sparse6Error

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def resolve_path(name: str) -> Path:
    """A literal path if it exists, else a packaged fixture of that name."""
    p = Path(name)
    if p.exists():
        return p
    parts = p.parts
    if parts and parts[0] == "fixtures":
        p = Path(*parts[1:])
    for cand in (FIXTURES / p, FIXTURES / "avg" / p.name, FIXTURES / "gadgets" / p.name):
        if cand.exists():
            return cand
    raise UsageError(f"no such file: {name}")


def thread_count(flag: int | None) -> int:
    if flag is not None:
        n = flag
    elif os.environ.get("HARDLAB_THREADS"):
        try:
            n = int(os.environ["HARDLAB_THREADS"])
        except ValueError as exc:
            raise UsageError("HARDLAB_THREADS must be an integer") from exc
    else:
        n = os.cpu_count() or 1
    if n < 1:
        raise UsageError("thread count must be positive")
    return n


def _emit(args, report: dict, human: str) -> None:
    report = {"schema_version": SCHEMA_VERSION, **report}
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    print(text if args.json else human)


def _opt(x) -> str | None:
    return None if x is None else str(x)


def _frac(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


# ---------------------------------------------------------------- graph

def cmd_graph_verify(args) -> int:
    from .graph_core import load_graph, degree_profile
    from .spectral_cert import (BOUNDARY, RAMANUJAN, PreconditionError, Violation, cut_fraction,
                                independent_set_fraction, is_ramanujan, load_witness)

    g = load_graph(resolve_path(args.graph))
    kind = "cut" if args.kind == "cut" else "independent_set"
    w = load_witness(resolve_path(args.witness), kind)
    prof = degree_profile(g)
    try:
        rep = is_ramanujan(g, args.mode)
    except PreconditionError as exc:
        _emit(args, {"n": g.n, "d": prof.d, "verdict": "not_regular", "error": str(exc)}, f"FAIL: {exc}")
        return EXIT_FAIL
    frac = cut_fraction(g, w) if kind == "cut" else independent_set_fraction(g, w)
    report = {"n": g.n, "d": rep.d, "lambda_star": rep.lambda_star, "threshold": rep.threshold,
              "error_bound": rep.error_bound, "verdict": rep.verdict, "mode": args.mode, "kind": kind}
    if isinstance(frac, Violation):
        report.update(witness_valid=False, violating_edges=[list(e) for e in frac.edges])
        _emit(args, report, f"FAIL: witness spans {len(frac.edges)} edge(s)")
        return EXIT_FAIL
    report.update(witness_valid=True, fraction=str(frac), fraction_num=frac.numerator,
                  fraction_den=frac.denominator, fraction_float=float(frac))
    ok = rep.verdict == RAMANUJAN
    human = f"{'OK' if ok else 'FAIL'}: n={g.n} d={rep.d} {rep.verdict} fraction {frac} ({float(frac):.6f})"
    if rep.verdict == BOUNDARY:
        human += " (float verdict inconclusive; rerun with --mode exact)"
    _emit(args, report, human)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_graph_spectrum(args) -> int:
    from .graph_core import load_graph
    from .spectral_cert import spectrum

    g = load_graph(resolve_path(args.graph))
    rep = spectrum(g)
    _emit(args, {"n": g.n, "eigenvalues": rep.eigenvalues, "error_bound": rep.error_bound, "sweeps": rep.sweeps},
          f"n={g.n} largest {max(rep.eigenvalues):.9f} smallest {min(rep.eigenvalues):.9f} "
          f"(error bound {rep.error_bound:.3g})")
    return EXIT_OK


# ---------------------------------------------------------------- gadgets and solving

def cmd_gadget_params(args) -> int:
    from .gadget_core import gadget_params, load_gadget

    g = load_gadget(resolve_path(args.gadget))
    p = gadget_params(g, args.residue, args.solver, args.deadline_ms)
    report = {"k": g.k, "residue": args.residue, "solver": args.solver, "authoritative": p.authoritative,
              "c": _opt(p.c), "c_prime": _opt(p.c_prime), "s": _opt(p.s), "t": str(p.t)}
    human = f"c={p.c} c'={p.c_prime} s={p.s} t={p.t}"
    if not p.authoritative:
        human = "FAIL: deadline exceeded; partial " + human
    _emit(args, report, human)
    return EXIT_OK if p.authoritative else EXIT_FAIL


def cmd_solve(args) -> int:
    from .gadget_core import parse_gadget
    from .kcut_solver import BACKENDS, KCutInstance, SolverTimeout

    g, fixed = parse_gadget(resolve_path(args.instance).read_text())
    inst = KCutInstance(g.k, g.num_vars, g.clauses, fixed)
    try:
        sol = BACKENDS[args.backend](inst, deadline_ms=args.deadline_ms)
    except SolverTimeout:
        _emit(args, {"status": "timeout", "backend": args.backend}, "FAIL: deadline exceeded")
        return EXIT_FAIL
    _emit(args, {"status": "optimal", "backend": args.backend, "value": str(sol.value),
                 "assignment": list(sol.assignment), "nodes": sol.nodes},
          f"value {sol.value} assignment {' '.join(map(str, sol.assignment))}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    from .gadget_core import load_gadget
    from .kcut_solver import SolverTimeout
    from .reduction_calc import complete_family, reduction_summary

    gadgets = [load_gadget(resolve_path(p)) for p in args.gadget]
    if any(g.k != args.k for g in gadgets):
        raise UsageError(f"every gadget must have k={args.k}")
    if args.rotate_last:
        gadgets = complete_family(gadgets, args.k)
    if len(gadgets) != args.k:
        raise UsageError(f"need {args.k} gadgets (or --rotate-last), got {len(gadgets)}")
    try:
        summ = reduction_summary(gadgets, args.solver, args.deadline_ms)
    except SolverTimeout as exc:
        _emit(args, {"status": "timeout", "error": str(exc)}, f"FAIL: {exc}")
        return EXIT_FAIL
    _emit(args, summ.to_json(), f"a={summ.a} b={summ.b} ratio={summ.ratio} (~{float(summ.ratio):.6f})")
    return EXIT_OK


# ---------------------------------------------------------------- LP bounds

def cmd_lp_bound(args) -> int:
    from .lp_bounds import INDEPENDENT_SET, MAX_CUT, certify_upper_bound, hoffman_bound

    mode = MAX_CUT if args.objective == "mc" else INDEPENDENT_SET
    res = certify_upper_bound(args.d, args.L, mode, args.delta, args.eps, backend=args.backend,
                              pruned=not args.unpruned, export_dir=args.export_dir)
    report = res.to_json()
    report["slow"] = res.classes > 1000
    report["hoffman"] = hoffman_bound(args.d, mode, res.lam)
    _emit(args, report, f"bound {float(res.bound):.3f} ({res.classes} classes, {res.lps_solved} LPs, "
                        f"{res.seconds:.1f}s)")
    return EXIT_OK


# ---------------------------------------------------------------- bench

def cmd_bench_gen(args) -> int:
    from .bench_harness import dataset_to_json, generate_instances

    data = generate_instances(args.k, args.m, args.count, args.seed)
    text = dataset_to_json(data)
    if args.out:
        Path(args.out).write_text(text + "\n")
    report = {"k": args.k, "m": args.m, "count": args.count, "seed": args.seed, "out": args.out}
    print(json.dumps({"schema_version": SCHEMA_VERSION, **report}, sort_keys=True) if args.json
          else f"{len(data)} instances" + (f" written to {args.out}" if args.out else ""))
    if not args.out:
        print(text)
    return EXIT_OK


def cmd_bench_run(args) -> int:
    from .bench_harness import BenchDisagreement, dataset_from_json, generate_instances, headline_m, run_bench

    backends = [b for b in args.backends.split(",") if b]
    if args.dataset:
        data = dataset_from_json(resolve_path(args.dataset).read_text())
    else:
        data = generate_instances(args.k, args.m, args.count, args.seed)
    threads = thread_count(args.threads)
    try:
        report = run_bench(data, backends, args.deadline_ms, threads)
    except BenchDisagreement as exc:
        _emit(args, {"agree": False, "error": str(exc)}, f"FAIL: {exc}")
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report.pop("schema_version")
    if args.headline:
        report["headline"] = {b: headline_m(args.k, b, args.seed, count=args.count)["headline_m"] for b in backends}
    lines = [f"{b}: mean {r['mean_s']:.4f}s median {r['median_s']:.4f}s solved {r['solved']}/{report['instances']}"
             for b, r in report["backends"].items()]
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------- search

def cmd_search_gadget(args) -> int:
    from .gadget_core import format_gadget, load_gadget
    from .search_loop import Budget, hill_climb_gadget

    initial = None
    if args.init:
        from .reduction_calc import complete_family
        initial = complete_family([load_gadget(resolve_path(p)) for p in args.init], args.k)
    budget = Budget(args.budget_evals, args.budget_seconds)
    fam, summ = hill_climb_gadget(args.k, args.naux, budget, args.seed, initial=initial, frozen=args.freeze or ())
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, g in enumerate(fam):
            (out / f"k{args.k}_I{i}.gad").write_text(format_gadget(g))
    report = {"evaluations": budget.used, "seed": args.seed, "out_dir": args.out_dir}
    if summ is None:
        report["valid"] = False
        _emit(args, report, "no valid family found")
        return EXIT_FAIL
    report.update(valid=True, **summ.to_json())
    _emit(args, report, f"best ratio {summ.ratio} (~{float(summ.ratio):.6f}) after {budget.used} evaluations")
    return EXIT_OK


def cmd_search_graph(args) -> int:
    from .graph_core import write_sparse6
    from .search_loop import Budget, hill_climb_graph

    budget = Budget(args.budget_evals, args.budget_seconds)
    g, w, score = hill_climb_graph(args.d, args.n_max, args.objective, budget, args.seed)
    report = {"evaluations": budget.used, "seed": args.seed, "n": g.n, "d": args.d, "objective": args.objective}
    if score == -math.inf:
        report["valid"] = False
        _emit(args, report, "no Ramanujan pair found")
        return EXIT_FAIL
    if args.out_prefix:
        Path(args.out_prefix + ".s6").write_bytes(write_sparse6(g, header=True) + b"\n")
        Path(args.out_prefix + ".witness").write_text(" ".join(map(str, sorted(w.vertices))) + "\n")
    report.update(valid=True, score=_frac(score), score_float=float(score))
    _emit(args, report, f"best score {score} (~{float(score):.6f}) on n={g.n}")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--out", help="also write the JSON report here")
    common.add_argument("--threads", type=int, default=None,
                        help="worker count (default: HARDLAB_THREADS, else all cores)")

    p = argparse.ArgumentParser(prog="hardlab", description="Hardness certificates and gadget verification.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")

    graph = sub.add_parser("graph", help="sparse6 graphs").add_subparsers(dest="sub")
    v = graph.add_parser("verify", parents=[common], help="Ramanujan check plus witness fraction")
    v.add_argument("--graph", required=True)
    v.add_argument("--witness", required=True)
    v.add_argument("--kind", choices=["cut", "is", "independent_set"], required=True)
    v.add_argument("--mode", choices=["float", "exact"], default="exact")
    v.set_defaults(func=cmd_graph_verify)
    s = graph.add_parser("spectrum", parents=[common], help="adjacency eigenvalues")
    s.add_argument("--graph", required=True)
    s.set_defaults(func=cmd_graph_spectrum)

    gadget = sub.add_parser("gadget", help="gadget files").add_subparsers(dest="sub")
    gp = gadget.add_parser("params", parents=[common], help="c, c', s, t of one gadget")
    gp.add_argument("--gadget", required=True)
    gp.add_argument("--residue", type=int, required=True)
    gp.add_argument("--solver", choices=["bnb", "brute"], default="bnb")
    gp.add_argument("--deadline-ms", type=float, default=None)
    gp.set_defaults(func=cmd_gadget_params)

    so = sub.add_parser("solve", parents=[common], help="exact MAX-k-CUT on an instance file")
    so.add_argument("--instance", required=True)
    so.add_argument("--backend", choices=["bnb", "brute"], default="bnb")
    so.add_argument("--deadline-ms", type=float, default=None)
    so.set_defaults(func=cmd_solve)

    r = sub.add_parser("reduce", parents=[common], help="reduction parameters a, b and ratio")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--gadget", action="append", required=True, help="gadget for residue 0, 1, ... in order")
    r.add_argument("--rotate-last", action="store_true", help="fill missing residues by rotating globals")
    r.add_argument("--solver", choices=["bnb", "brute"], default="bnb")
    r.add_argument("--deadline-ms", type=float, default=None)
    r.set_defaults(func=cmd_reduce)

    lp = sub.add_parser("lp-bound", parents=[common], help="certified upper bound from the labeling LP")
    lp.add_argument("--objective", choices=["mc", "is"], required=True)
    lp.add_argument("--d", type=int, required=True)
    lp.add_argument("--L", type=int, required=True)
    lp.add_argument("--delta", default="0.0005")
    lp.add_argument("--eps", type=float, default=1e-5)
    lp.add_argument("--backend", choices=["highs", "simplex", "exact"], default="highs")
    lp.add_argument("--unpruned", action="store_true", help="keep labelings that are not locally optimal")
    lp.add_argument("--export-dir", default=None)
    lp.set_defaults(func=cmd_lp_bound)

    bench = sub.add_parser("bench", help="synthetic benchmark").add_subparsers(dest="sub")
    for name, func in (("gen", cmd_bench_gen), ("run", cmd_bench_run)):
        b = bench.add_parser(name, parents=[common])
        b.add_argument("--k", type=int, default=3)
        b.add_argument("--m", type=int, default=10)
        b.add_argument("--count", type=int, default=20)
        b.add_argument("--seed", type=int, default=0)
        if name == "run":
            b.add_argument("--dataset", default=None, help="JSON from 'bench gen' (else generated)")
            b.add_argument("--backends", default="bnb,brute")
            b.add_argument("--deadline-ms", type=float, default=1000.0)
            b.add_argument("--headline", action="store_true", help="also find the largest m within 1 s mean")
        b.set_defaults(func=func)

    search = sub.add_parser("search", help="seeded hill climbing").add_subparsers(dest="sub")
    sg = search.add_parser("gadget", parents=[common])
    sg.add_argument("--k", type=int, required=True)
    sg.add_argument("--naux", type=int, required=True)
    sg.add_argument("--budget-evals", type=int, required=True)
    sg.add_argument("--budget-seconds", type=float, default=None)
    sg.add_argument("--seed", type=int, default=0)
    sg.add_argument("--init", action="append", help="starting gadgets, residue order")
    sg.add_argument("--freeze", type=int, action="append", help="residue whose gadget stays fixed")
    sg.add_argument("--out-dir", default=None)
    sg.set_defaults(func=cmd_search_gadget)
    sr = search.add_parser("graph", parents=[common])
    sr.add_argument("--d", type=int, choices=[3, 4], required=True)
    sr.add_argument("--objective", choices=["mc", "is"], required=True)
    sr.add_argument("--n-max", type=int, default=40)
    sr.add_argument("--budget-evals", type=int, required=True)
    sr.add_argument("--budget-seconds", type=float, default=None)
    sr.add_argument("--seed", type=int, default=0)
    sr.add_argument("--out-prefix", default=None)
    sr.set_defaults(func=cmd_search_graph)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, Sparse6Error, GadgetFormatError, OSError) as exc:
        print(f"hardlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
