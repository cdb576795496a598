"""Command-line entry point: ``lepi <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 numeric failure.
Items are 1-based in every file and flag.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from . import apps
from .bnc import InfeasibleModel, SolveConfig, solve, write_csv_rows
from .core import (NEG_SQUARE, PIECEWISE_LINEAR_MIN, ConcaveFunction, GubInstance, Inequality, ModelError,
                   normalize_instance)
from .lifting import (cut_to_json, dominance_check, epi_coefficients, lepi_coefficients,
                      lepi_coefficients_fast, lepi_coefficients_general)
from .linopt import optimize_linear_X
from .oracle import (TooLarge, brute_force_linear, distinct_lepis, enumerate_feasible, lifting_oracle_all,
                     membership_oracle, partial_ascending_permutations)
from .permutation import frontier_sets, is_partial_ascending, make_partial_ascending
from .separation import Inside, separate

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- JSON helpers ---------------------------------------------------------------

def _num(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}")


def _auto_exact(d: dict) -> bool:
    if "exact" in d:
        return bool(d["exact"])
    kind = d.get("f", {}).get("kind")
    nums = list(d.get("a", [])) + list(d.get("b") or [])
    return kind in (NEG_SQUARE, PIECEWISE_LINEAR_MIN) and all(isinstance(v, (int, str)) for v in nums)


def instance_from_json(d: dict, path: str = "<instance>") -> GubInstance:
    """``{"n", "a", "b"|null, "groups" (1-based), "f": {"kind", "params"}}``."""
    try:
        n = int(d["n"])
        a = d["a"]
        groups = [[int(i) - 1 for i in g] for g in d["groups"]]
        fspec = d["f"]
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: bad instance field ({e!r})")
    if len(a) != n:
        raise UsageError(f"{path}: 'a' has {len(a)} entries, expected n = {n}")
    exact = _auto_exact(d)
    f = ConcaveFunction.from_spec(fspec["kind"], fspec.get("params"), exact=exact)
    return normalize_instance(a, groups, f, b=d.get("b"), exact=exact)


def instance_to_json(inst: GubInstance) -> dict:
    user_a = inst.to_user(inst.a)
    return {
        "n": inst.n,
        "a": [_num(v) for v in user_a],
        "b": None if inst.b is None else [_num(v) for v in inst.to_user(inst.b)],
        "groups": [[i + 1 for i in g] for g in inst.user_groups()],
        "f": inst.f.to_spec(),
    }


def _user_vector(inst: GubInstance, v, name: str, path: str) -> tuple:
    if not isinstance(v, list) or len(v) != inst.n:
        raise UsageError(f"{path}: '{name}' must be a list of {inst.n} numbers")
    conv = Fraction if inst.is_exact else float
    try:
        vals = [conv(str(x)) if conv is Fraction else float(x) for x in v]
    except (TypeError, ValueError):
        raise UsageError(f"{path}: '{name}' has a non-numeric entry")
    return inst.to_canonical(vals)


def inequality_to_json(ineq: Inequality, inst: GubInstance) -> dict:
    order = inst.user_order()
    out = {
        "kind": ineq.kind,
        "mode": ineq.mode,
        "pi0": _num(ineq.pi0),
        "pi": [_num(v) for v in inst.to_user(ineq.pi)],
    }
    if ineq.delta is not None:
        out["delta"] = [order[i] + 1 for i in ineq.delta]
    if ineq.rhs is not None:
        out["rhs"] = _num(ineq.rhs)
    return out


def _support_json(inst: GubInstance, S) -> list:
    order = inst.user_order()
    return sorted(order[i] + 1 for i in S)


def _parse_delta(text: str, inst: GubInstance) -> tuple:
    try:
        user = [int(t) - 1 for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--delta must be comma-separated item ids, got {text!r}")
    if sorted(user) != list(range(inst.n)):
        raise UsageError(f"--delta must be a permutation of 1..{inst.n}")
    return tuple(inst.index_map[u] for u in user)


# -- commands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    if args.app == "mpclp":
        inst = apps.generate_mpclp(args.customers, args.facilities, args.types, args.seed, args.threshold)
    else:
        inst = apps.generate_mpkpg(args.n, args.m, args.beta, args.seed)
    _emit(inst.to_dict(), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    d = read_json(args.instance)
    try:
        inst = apps.instance_from_dict(d)
    except (KeyError, ValueError) as e:
        raise UsageError(f"{args.instance}: {e}")
    model = apps.build_model(inst)
    cfg = SolveConfig(cut_family=args.cuts, time_limit=args.time_limit, node_limit=args.node_limit,
                      engine=args.engine)
    report = solve(model, cfg)
    text = report.to_json(with_time=args.with_time) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    print(f"time_s {report.time_s:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_separate(args) -> int:
    inst = instance_from_json(read_json(args.instance), args.instance)
    p = read_json(args.point)
    if "w" not in p or "x" not in p:
        raise UsageError(f"{args.point}: point needs 'w' and 'x'")
    x = _user_vector(inst, p["x"], "x", args.point)
    w = Fraction(str(p["w"])) if inst.is_exact else float(p["w"])
    res = separate(inst, x, w, tol=args.tol)
    if isinstance(res, Inside):
        cert = res.certificate
        out = {
            "status": "inside",
            "certificate": {
                "supports": [_support_json(inst, S) for S in cert.supports],
                "weights": [_num(v) for v in cert.weights],
                "value": _num(cert.value),
                "delta": [inst.user_order()[i] + 1 for i in cert.delta],
            },
        }
    else:
        out = {"status": "violated", "violation": _num(res.violation), "cut": inequality_to_json(res.cut, inst)}
    _emit(out, args.output)
    return EXIT_OK


def cmd_optimize(args) -> int:
    inst = instance_from_json(read_json(args.instance), args.instance)
    c_raw = read_json(args.c_file)
    if isinstance(c_raw, dict):
        c_raw = c_raw.get("c")
    c = _user_vector(inst, c_raw, "c", args.c_file)
    d = Fraction(args.d) if inst.is_exact else float(Fraction(args.d))
    res = optimize_linear_X(inst, d, c)
    out = {"status": res.status}
    if res.status == "optimal":
        out.update(value=_num(res.value), support=_support_json(inst, res.support), w=_num(res.w))
    _emit(out, args.output)
    return EXIT_OK


def cmd_cuts(args) -> int:
    inst = instance_from_json(read_json(args.instance), args.instance)
    delta = _parse_delta(args.delta, inst)
    cc = lepi_coefficients(inst, delta) if args.family == "lepi" else epi_coefficients(inst, delta)
    _emit(cut_to_json(cc, inst), args.output)
    return EXIT_OK


def _random_point(inst: GubInstance, rng: random.Random):
    x = [0.0] * inst.n
    for lo, hi in inst.blocks:
        raw = [rng.random() for _ in range(hi - lo + 1)]
        s = sum(raw)
        for r, i in enumerate(range(lo, hi)):
            x[i] = raw[r] / s
    return x


def verify_instance(inst: GubInstance, max_n: int = 8, seed: int = 42, points: int = 200) -> list:
    """(name, passed, detail) rows of the oracle property suite for one instance."""
    if inst.n > max_n:
        raise TooLarge(f"n = {inst.n} exceeds --max-n {max_n}")
    exact = inst.is_exact
    tol = 0 if exact else 1e-8
    close = lambda u, v: all(abs(p - q) <= tol * max(1.0, abs(float(q))) for p, q in zip(u, v))
    fam = enumerate_feasible(inst)
    rows = []
    perms = list(itertools.permutations(range(inst.n)))
    bad = sum(not close(lepi_coefficients_general(inst, d).coef, lifting_oracle_all(inst, d, fam)) for d in perms)
    rows.append(("lifting == brute-force lifting", bad == 0, f"{len(perms) - bad}/{len(perms)} permutations"))
    asc = list(partial_ascending_permutations(inst))
    bad = sum(not close(lepi_coefficients_fast(inst, d).coef, lepi_coefficients_general(inst, d).coef) for d in asc)
    rows.append(("fast == general on partial ascending", bad == 0, f"{len(asc) - bad}/{len(asc)}"))
    bad = sum(not dominance_check(inst, d) for d in perms)
    rows.append(("LEPI dominates EPI", bad == 0, f"{len(perms) - bad}/{len(perms)}"))
    bad = 0
    for d in perms:
        d2 = make_partial_ascending(inst, d)
        if not is_partial_ascending(inst, d2) or frontier_sets(inst, d).collection() != frontier_sets(inst, d2).collection():
            bad += 1
    rows.append(("reordering keeps the tight-set collection", bad == 0, f"{len(perms) - bad}/{len(perms)}"))
    rng = random.Random(seed)
    lepis = distinct_lepis(inst)
    b = inst.b or (0,) * inst.n
    bad = 0
    for _ in range(points):
        x = _random_point(inst, rng)
        mid = float(inst.f(sum(ai * xi for ai, xi in zip(inst.a, x)))) + sum(float(bi) * xi for bi, xi in zip(b, x))
        w = mid + rng.uniform(-2.0, 2.0) * (1.0 + abs(mid))
        a_in = membership_oracle(inst, x, w, tol=1e-9, lepis=lepis)
        s_in = isinstance(separate(inst, x, w, tol=1e-9), Inside)
        bad += a_in != s_in
    rows.append(("separation == membership oracle", bad == 0, f"{points - bad}/{points} points"))
    bad = 0
    for _ in range(points):
        c = [rng.randint(-20, 20) for _ in range(inst.n)]
        d = rng.choice([0, 1, 2])
        got = optimize_linear_X(inst, d, c).value
        cb = [ci + d * bi for ci, bi in zip(c, b)]
        want = brute_force_linear(inst, d, cb, fam)[0]
        bad += abs(got - want) > (0 if exact else 1e-8 * max(1.0, abs(float(want))))
    rows.append(("linear optimizer == enumeration", bad == 0, f"{points - bad}/{points} objectives"))
    return rows


def cmd_verify(args) -> int:
    inst = instance_from_json(read_json(args.instance), args.instance)
    rows = verify_instance(inst, args.max_n, args.seed, args.points)
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    return EXIT_OK if all(r[1] for r in rows) else EXIT_NUMERIC


def bench_rows(suite: str = "desk", seeds: int = 3, families=("none", "epi", "lepi"), time_limit: float = 60.0,
               seed: int = 42) -> list:
    if suite != "desk":
        raise UsageError(f"unknown suite {suite!r}")
    jobs = []
    for sizes in apps.DESK_MPCLP:
        for r in range(seeds):
            jobs.append(("mpclp", "I=%d J=%d S=%d" % sizes, apps.generate_mpclp(*sizes, seed=seed + r)))
    for n, m in apps.DESK_MPKPG:
        for r in range(seeds):
            jobs.append(("mpkpg", f"n={n} m={m} beta=0.5", apps.generate_mpkpg(n, m, 0.5, seed + r)))
    rows = []
    for app, params, inst in jobs:
        model = apps.build_model(inst)
        for fam in families:
            rep = solve(model, SolveConfig(cut_family=fam, time_limit=time_limit))
            rows.append({"app": app, "params": f"{params} seed={inst.seed}", "cuts": fam, **rep.table_row()})
    return rows


def cmd_bench(args) -> int:
    fams = tuple(f.strip() for f in args.cuts.split(","))
    for f in fams:
        if f not in ("none", "epi", "lepi"):
            raise UsageError(f"unknown cut family {f!r}")
    rows = bench_rows(args.suite, args.seeds, fams, args.time_limit, args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv_rows(rows, fh)
    else:
        sys.stdout.write(write_csv_rows(rows))
    return EXIT_OK


def _emit(obj, path: Optional[str]):
    text = dumps(obj)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lepi", description="Lifted polymatroid cuts for submodular sets with GUB rows.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="generate an application instance")
    g.add_argument("--app", choices=["mpclp", "mpkpg"], required=True)
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--customers", type=int, default=20)
    g.add_argument("--facilities", type=int, default=4)
    g.add_argument("--types", type=int, default=2)
    g.add_argument("--threshold", type=float, default=None)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--beta", type=float, default=0.5)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="branch-and-cut on a generated instance")
    s.add_argument("instance")
    s.add_argument("--cuts", choices=["none", "epi", "lepi"], default="lepi")
    s.add_argument("--time-limit", type=float, default=600.0)
    s.add_argument("--node-limit", type=int, default=1_000_000)
    s.add_argument("--engine", choices=["simplex", "highs"], default="simplex")
    s.add_argument("--report")
    s.add_argument("--with-time", action="store_true", help="include wall time in the JSON report")
    s.set_defaults(func=cmd_solve)

    sp = sub.add_parser("separate", help="separate a point from the convex hull")
    sp.add_argument("instance")
    sp.add_argument("--point", required=True)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_separate)

    o = sub.add_parser("optimize", help="minimise d*w + c'x over the set")
    o.add_argument("instance")
    o.add_argument("--d", required=True)
    o.add_argument("--c-file", required=True)
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_optimize)

    c = sub.add_parser("cuts", help="coefficients for one permutation")
    c.add_argument("instance")
    c.add_argument("--delta", required=True)
    c.add_argument("--family", choices=["epi", "lepi"], default="lepi")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_cuts)

    v = sub.add_parser("verify", help="run the brute-force property suite on an instance")
    v.add_argument("instance")
    v.add_argument("--max-n", type=int, default=8)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--points", type=int, default=200)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="desk-scale comparison of cut families")
    b.add_argument("--suite", default="desk")
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--cuts", default="none,epi,lepi")
    b.add_argument("--time-limit", type=float, default=60.0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"lepi: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, InfeasibleModel, TooLarge, ArithmeticError) as e:
        print(f"lepi: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
