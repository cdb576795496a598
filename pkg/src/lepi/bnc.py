"""A small branch-and-cut for binary programs with submodular GUB substructures.

Variables are binaries ``x`` and continuous epigraph variables ``w``.  Each
substructure is a :class:`GubInstance` over a subset of the binaries, either
in epigraph mode (``w_k >= f(a'x) + b'x`` with ``w_k`` a model variable whose
f is offset-normalised, i.e. f(0) = 0) or in fixed-rhs mode
(``f(a'x) + b'x <= rhs``).  Cuts from the chosen family are separated at the
root until no violated cut remains, capped per node elsewhere, and always
lazily at integral candidates so that every accepted incumbent is feasible.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import EPIGRAPH, FIXED_RHS, GubInstance, Inequality, ModelError
from .lifting import epi_coefficients, lepi_coefficients_fast, shift_for_X
from .lp import LPResult, solve_lp, solve_lp_highs
from .permutation import block_identity
from .separation import Violated, separate, separate_epi

CUT_FAMILIES = ("none", "epi", "lepi")


class InfeasibleModel(Exception):
    pass


class Infeasible(Exception):
    """Raised by :func:`relaxation_solve` when the LP has no feasible point."""


@dataclass
class LinearRow:
    coef_x: np.ndarray
    coef_w: np.ndarray
    sense: str  # "<=", ">=", "=="
    rhs: float


@dataclass
class Substructure:
    inst: GubInstance
    vars: tuple  # canonical item -> model binary index
    mode: str = EPIGRAPH
    w: Optional[int] = None
    rhs: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if len(self.vars) != self.inst.n:
            raise ModelError(f"substructure {self.name!r}: {len(self.vars)} vars for {self.inst.n} items")
        if self.mode == EPIGRAPH and self.w is None:
            raise ModelError(f"substructure {self.name!r}: epigraph mode needs a w index")
        if self.mode == FIXED_RHS and (self.rhs is None or not math.isfinite(self.rhs)):
            raise ModelError(f"substructure {self.name!r}: fixed-rhs mode needs a finite bound")


@dataclass
class Model:
    n_x: int
    c_x: np.ndarray
    n_w: int = 0
    c_w: Optional[np.ndarray] = None
    sense: str = "min"
    obj_const: float = 0.0
    rows: list = field(default_factory=list)
    gub: list = field(default_factory=list)  # tuples of binary indices, sum <= 1
    subs: list = field(default_factory=list)

    def __post_init__(self):
        self.c_x = np.asarray(self.c_x, dtype=float)
        self.c_w = np.zeros(self.n_w) if self.c_w is None else np.asarray(self.c_w, dtype=float)
        if self.sense not in ("min", "max"):
            raise ModelError(f"unknown sense {self.sense!r}")

    @property
    def sign(self) -> float:
        return 1.0 if self.sense == "min" else -1.0

    def add_row(self, coef_x, sense: str, rhs: float, coef_w=None):
        cx = np.zeros(self.n_x)
        for j, v in dict(coef_x).items():
            cx[j] += v
        cw = np.zeros(self.n_w)
        for j, v in dict(coef_w or {}).items():
            cw[j] += v
        self.rows.append(LinearRow(cx, cw, sense, float(rhs)))

    def validate(self):
        seen = set()
        for g in self.gub:
            if seen.intersection(g):
                raise ModelError("GUB rows must be disjoint")
            seen.update(g)
        gub_of = {j: tuple(g) for g in self.gub for j in g}
        for s in self.subs:
            for lo, hi in s.inst.blocks:
                block = [s.vars[i] for i in range(lo, hi)]
                if hi - lo > 1 and any(gub_of.get(j) != gub_of.get(block[0]) or j not in gub_of for j in block):
                    raise ModelError(f"substructure {s.name!r}: block {block} is not inside one model GUB row")
        if np.any(self.sign * self.c_w < 0):
            raise ModelError("epigraph variables must be pushed down by the objective")

    def enumeration_groups(self) -> list:
        covered = {j for g in self.gub for j in g}
        return [tuple(g) for g in self.gub] + [(j,) for j in range(self.n_x) if j not in covered]

    def nonlinear_values(self, s: Substructure, X: np.ndarray) -> np.ndarray:
        Xs = X[:, list(s.vars)]
        z = Xs @ np.asarray(s.inst.a, dtype=float)
        v = s.inst.f.values(z)
        if s.inst.b is not None:
            v = v + Xs @ np.asarray(s.inst.b, dtype=float)
        return v

    def evaluate_binaries(self, X: np.ndarray, tol: float = 1e-7):
        """Feasibility mask and cheapest w for each binary row of ``X``."""
        N = len(X)
        ok = np.ones(N, dtype=bool)
        for g in self.gub:
            ok &= X[:, list(g)].sum(axis=1) <= 1 + tol
        L = np.full((N, self.n_w), -np.inf)
        for s in self.subs:
            v = self.nonlinear_values(s, X)
            if s.mode == EPIGRAPH:
                L[:, s.w] = np.maximum(L[:, s.w], v)
            else:
                ok &= v <= s.rhs + tol * max(1.0, abs(s.rhs))
        for r in self.rows:
            lhs = X @ r.coef_x
            nz = np.nonzero(r.coef_w)[0]
            if len(nz) == 0:
                if r.sense == "<=":
                    ok &= lhs <= r.rhs + tol
                elif r.sense == ">=":
                    ok &= lhs >= r.rhs - tol
                else:
                    ok &= np.abs(lhs - r.rhs) <= tol
                continue
            k = int(nz[0])
            cw = r.coef_w[k]
            if len(nz) > 1 or r.sense == "==" or (r.sense == ">=") != (cw > 0):
                raise ModelError("rows with w must be single-variable lower bounds on w")
            L[:, k] = np.maximum(L[:, k], (r.rhs - lhs) / cw)
        free = ~np.isfinite(L)
        if np.any(free & (self.sign * self.c_w > 0)):
            raise ModelError("some w variable has no lower bound")
        W = np.where(free, 0.0, L)
        return ok, W

    def objective_values(self, X: np.ndarray, W: np.ndarray) -> np.ndarray:
        return X @ self.c_x + (W @ self.c_w if self.n_w else 0.0) + self.obj_const


@dataclass
class SolveConfig:
    cut_family: str = "lepi"
    sep_tol: float = 1e-6
    int_tol: float = 1e-6
    rel_gap: float = 1e-7
    node_limit: int = 1_000_000
    time_limit: float = 3600.0
    root_rounds: int = 200
    node_cut_cap: int = 10
    restart_every: int = 1000
    engine: str = "simplex"  # "simplex" | "highs"
    audit: bool = False

    def __post_init__(self):
        if self.cut_family not in CUT_FAMILIES:
            raise ValueError(f"cut_family must be one of {CUT_FAMILIES}")


@dataclass
class SolveReport:
    status: str  # "optimal" | "limit"
    objective: Optional[float]
    best_bound: Optional[float]
    x: Optional[list]
    w: Optional[list]
    nodes: int
    lp_solves: int
    cuts: dict
    root_value: Optional[float]
    root_gap_pct: Optional[float]
    end_gap_pct: Optional[float]
    time_s: float
    cut_family: str
    audit_violations: Optional[int] = None

    @property
    def solved(self) -> bool:
        return self.status == "optimal"

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, with_time: bool = True) -> str:
        d = self.to_dict()
        if not with_time:
            d.pop("time_s")
        return json.dumps(d, indent=2, sort_keys=True)

    def table_row(self) -> dict:
        return {
            "solved": int(self.solved),
            "time_s": round(self.time_s, 3),
            "nodes": self.nodes,
            "egap_pct": _round(self.end_gap_pct),
            "rgap_pct": _round(self.root_gap_pct),
        }


def _round(v, digits=4):
    return None if v is None else round(v, digits)


def write_csv_rows(rows: Sequence[dict], fh=None) -> str:
    """CSV with the bench columns; returns the text when ``fh`` is None."""
    cols = ["app", "params", "cuts", "solved", "time_s", "nodes", "egap_pct", "rgap_pct"]
    out = fh or io.StringIO()
    w = csv.DictWriter(out, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return out.getvalue() if fh is None else ""


def relaxation_solve(c, A_ub, b_ub, A_eq=None, b_eq=None, lb=None, ub=None, engine: str = "simplex") -> LPResult:
    """LP optimum of the node relaxation; raises :class:`Infeasible`."""
    solver = solve_lp_highs if engine == "highs" else solve_lp
    res = solver(c, A_ub, b_ub, A_eq, b_eq, lb, ub)
    if res.status == "infeasible":
        raise Infeasible()
    if res.status != "optimal":
        raise ModelError(f"relaxation {res.status}")
    return res


def _gap_pct(z_opt, z_other) -> Optional[float]:
    if z_opt is None or z_other is None:
        return None
    if z_opt == 0:
        return 0.0 if abs(z_other) < 1e-12 else None
    return 100.0 * abs(z_opt - z_other) / abs(z_opt)


@dataclass
class _Node:
    lo: np.ndarray
    hi: np.ndarray
    bound: float
    cuts: tuple
    seq: int


class _Search:
    def __init__(self, model: Model, cfg: SolveConfig):
        model.validate()
        self.m = model
        self.cfg = cfg
        n_x, n_w = model.n_x, model.n_w
        self.nv = n_x + n_w
        self.c = model.sign * np.concatenate([model.c_x, model.c_w])
        rows, rhs, eq_rows, eq_rhs = [], [], [], []
        for r in model.rows:
            v = np.concatenate([r.coef_x, r.coef_w])
            if r.sense == "<=":
                rows.append(v); rhs.append(r.rhs)
            elif r.sense == ">=":
                rows.append(-v); rhs.append(-r.rhs)
            else:
                eq_rows.append(v); eq_rhs.append(r.rhs)
        for g in model.gub:
            v = np.zeros(self.nv)
            v[list(g)] = 1.0
            rows.append(v); rhs.append(1.0)
        self.A = np.array(rows).reshape(-1, self.nv)
        self.b = np.array(rhs, dtype=float)
        self.Aeq = np.array(eq_rows).reshape(-1, self.nv) if eq_rows else None
        self.beq = np.array(eq_rhs, dtype=float) if eq_rows else None
        self.pool_rows: list = []
        self.pool_rhs: list = []
        self.pool_keys: dict = {}
        self.pool_kind: list = []
        self.pool_A = np.zeros((0, self.nv))
        self.pool_b = np.zeros(0)
        self.cut_counts: dict = {}
        self.lp_solves = 0
        self.incumbent = math.inf  # min-sense
        self.inc_x = None
        self.inc_w = None
        self.found: list = []
        self.keep: set = set()  # initial cuts stay in every node LP

    # -- cut pool ---------------------------------------------------------
    def cut_row(self, s: Substructure, ineq: Inequality):
        v = np.zeros(self.nv)
        for i, p in enumerate(ineq.pi):
            v[s.vars[i]] += float(p)
        if ineq.mode == EPIGRAPH:
            v[self.m.n_x + s.w] -= 1.0
            return v, -float(ineq.pi0)
        return v, float(ineq.rhs)

    def add_to_pool(self, s: Substructure, ineq: Inequality) -> Optional[int]:
        v, r = self.cut_row(s, ineq)
        key = (tuple(np.round(v, 9)), round(r, 9))
        if key in self.pool_keys:
            return None
        idx = len(self.pool_rows)
        self.pool_keys[key] = idx
        self.pool_rows.append(v)
        self.pool_rhs.append(r)
        self.pool_kind.append(ineq.kind)
        self.pool_A = np.vstack([self.pool_A, v[None, :]])
        self.pool_b = np.append(self.pool_b, r)
        self.cut_counts[ineq.kind] = self.cut_counts.get(ineq.kind, 0) + 1
        return idx

    def initial_cuts(self) -> list:
        family = self.cfg.cut_family
        ids = []
        for s in self.m.subs:
            delta = block_identity(s.inst)
            cc = lepi_coefficients_fast(s.inst, delta) if family == "lepi" else epi_coefficients(s.inst, delta)
            if s.inst.b is not None:
                cc = shift_for_X(cc, s.inst)
            ineq = cc.inequality()
            if s.mode == FIXED_RHS:
                ineq = ineq.fix_rhs(s.rhs)
            idx = self.add_to_pool(s, ineq)
            if idx is not None:
                ids.append(idx)
        return ids

    # -- separation -------------------------------------------------------
    def separate_sub(self, s: Substructure, x: np.ndarray, w: np.ndarray, use_epi: bool) -> Optional[Inequality]:
        xs = [min(1.0, max(0.0, float(x[j]))) for j in s.vars]
        tol = self.cfg.sep_tol
        target = float(w[s.w]) if s.mode == EPIGRAPH else float(s.rhs)
        if use_epi:
            res = separate_epi(s.inst, xs, target, tol)
        else:
            res = separate(s.inst, xs, target, tol)
        if not isinstance(res, Violated) or res.cut.kind in ("BOUND", "GUB"):
            return None
        cut = res.cut
        if s.mode == FIXED_RHS:
            cut = cut.fix_rhs(s.rhs)
        return cut

    def cut_loop(self, x: np.ndarray, w: np.ndarray, integral: bool, budget: Optional[list]) -> list:
        """Violated cuts at (x, w), one per substructure, respecting ``budget``."""
        family = self.cfg.cut_family
        if family == "none" and not integral:
            return []
        out = []
        for k, s in enumerate(self.m.subs):
            if budget is not None and budget[k] <= 0 and not integral:
                continue
            cut = self.separate_sub(s, x, w, use_epi=family != "lepi")
            if cut is None:
                continue
            idx = self.add_to_pool(s, cut)
            if idx is None:
                # already pooled; it is violated so it must be missing from the node LP
                v, r = self.cut_row(s, cut)
                idx = self.pool_keys[(tuple(np.round(v, 9)), round(r, 9))]
            out.append(idx)
            if budget is not None:
                budget[k] -= 1
        return out

    # -- node processing --------------------------------------------------
    def lp(self, lo, hi, cut_ids) -> LPResult:
        A, b = self.A, self.b
        if cut_ids:
            ids = list(cut_ids)
            A = np.vstack([A, self.pool_A[ids]])
            b = np.concatenate([b, self.pool_b[ids]])
        lb = np.concatenate([lo, np.full(self.m.n_w, -np.inf)])
        ub = np.concatenate([hi, np.full(self.m.n_w, np.inf)])
        self.lp_solves += 1
        return relaxation_solve(self.c, A, b, self.Aeq, self.beq, lb, ub, engine=self.cfg.engine)

    def process(self, node: _Node, root: bool, deadline: float):
        """Returns ("pruned"|"integral"|"branch", value, LP point, cut ids)."""
        cfg = self.cfg
        cuts = list(node.cuts)
        in_lp = set(cuts)
        budget = None if root else [cfg.node_cut_cap] * len(self.m.subs)
        rounds = 0
        n_x = self.m.n_x
        while True:
            try:
                res = self.lp(node.lo, node.hi, cuts)
            except Infeasible:
                return "pruned", math.inf, None, cuts
            z = res.fun
            if z >= self.incumbent - self.prune_tol():
                return "pruned", z, None, cuts
            v = res.x
            if len(self.pool_b):
                slack = self.pool_A @ v - self.pool_b
                new = [int(i) for i in np.nonzero(slack > cfg.sep_tol)[0] if int(i) not in in_lp]
                if new:
                    cuts.extend(new); in_lp.update(new)
                    continue
            x, w = v[:n_x], v[n_x:]
            frac = np.minimum(x - np.floor(x), np.ceil(x) - x)
            integral = bool(np.all(frac <= cfg.int_tol))
            if time.perf_counter() > deadline and not integral:
                return "branch", z, v, cuts
            if root and rounds >= cfg.root_rounds:
                budget = [0] * len(self.m.subs)
            new = [i for i in self.cut_loop(x, w, integral, budget) if i not in in_lp]
            if new:
                rounds += 1
                cuts.extend(new); in_lp.update(new)
                continue
            if integral:
                return "integral", z, v, cuts
            return "branch", z, v, cuts

    def slack(self, i: int, v: np.ndarray) -> float:
        return float(self.pool_A[i] @ v - self.pool_b[i])

    def prune_tol(self) -> float:
        if not math.isfinite(self.incumbent):
            return 0.0
        return self.cfg.rel_gap * max(1.0, abs(self.incumbent))

    def accept(self, x: np.ndarray) -> bool:
        xr = np.round(x)[None, :]
        ok, W = self.m.evaluate_binaries(xr, tol=max(self.cfg.sep_tol, 1e-7))
        if not ok[0]:
            return False
        val = self.m.sign * float(self.m.objective_values(xr, W)[0])
        if self.cfg.audit:
            self.found.append((xr[0].copy(), W[0].copy()))
        if val < self.incumbent - 1e-12:
            self.incumbent, self.inc_x, self.inc_w = val, xr[0].copy(), W[0].copy()
        return True

    def audit(self) -> int:
        bad = 0
        for x, W in self.found:
            v = np.concatenate([x, W])
            if len(self.pool_b):
                bad += int(np.sum(self.pool_A @ v - self.pool_b > 1e-6))
        return bad


def _branch_var(x: np.ndarray) -> int:
    frac = np.minimum(x - np.floor(x), np.ceil(x) - x)
    return int(np.argmax(frac))  # first maximum = smallest index on ties


def solve(model: Model, config: Optional[SolveConfig] = None) -> SolveReport:
    cfg = config or SolveConfig()
    t0 = time.perf_counter()
    deadline = t0 + cfg.time_limit
    S = _Search(model, cfg)
    root_cuts = tuple(S.initial_cuts())
    S.keep = set(root_cuts)
    lo, hi = np.zeros(model.n_x), np.ones(model.n_x)
    stack = [_Node(lo, hi, -math.inf, root_cuts, 0)]
    seq = 1
    nodes = 0
    root_value = None
    limit_hit = False
    while stack:
        if nodes >= cfg.node_limit or time.perf_counter() > deadline:
            limit_hit = True
            break
        if nodes and cfg.restart_every and nodes % cfg.restart_every == 0:
            stack.sort(key=lambda nd: (-nd.bound, -nd.seq))
        node = stack.pop()
        if node.bound >= S.incumbent - S.prune_tol():
            continue
        is_root = nodes == 0
        nodes += 1
        kind, z, v, cuts = S.process(node, is_root, deadline)
        x = None if v is None else v[: model.n_x]
        if is_root:
            root_value = z
        if kind == "pruned":
            continue
        if kind == "integral":
            if S.accept(x):
                continue
            # integral for the LP but rejected by direct evaluation: split on a free variable
            free = np.nonzero(node.hi - node.lo > 0.5)[0]
            if len(free) == 0:
                continue
            x = x.copy()
            x[int(free[0])] = 0.5
        v_cuts = tuple(i for i in cuts if i in S.keep or S.slack(i, v) > -1e-6)
        j = _branch_var(x)
        down_hi = node.hi.copy(); down_hi[j] = 0.0
        up_lo = node.lo.copy(); up_lo[j] = 1.0
        down = _Node(node.lo, down_hi, z, v_cuts, seq)
        up = _Node(up_lo, node.hi, z, v_cuts, seq + 1)
        seq += 2
        # the child on the rounding side of x_j is explored first
        if x[j] >= 0.5:
            stack.extend([down, up])
        else:
            stack.extend([up, down])

    elapsed = time.perf_counter() - t0
    if not limit_hit and not math.isfinite(S.incumbent):
        raise InfeasibleModel("no feasible binary assignment")
    sign = model.sign
    obj = sign * S.incumbent if math.isfinite(S.incumbent) else None
    if limit_hit:
        open_bounds = [nd.bound for nd in stack]
        lb = min(open_bounds + [S.incumbent]) if open_bounds else S.incumbent
        if not math.isfinite(lb):
            lb = root_value if root_value is not None else -math.inf
        best_bound = sign * lb if math.isfinite(lb) else None
        status = "optimal" if math.isfinite(S.incumbent) and lb >= S.incumbent - S.prune_tol() else "limit"
    else:
        best_bound, status = obj, "optimal"
    root_user = None if root_value is None or not math.isfinite(root_value) else sign * root_value
    if root_value == math.inf:
        root_user = obj
    return SolveReport(
        status=status,
        objective=obj,
        best_bound=best_bound,
        x=None if S.inc_x is None else [int(round(v)) for v in S.inc_x],
        w=None if S.inc_w is None else [float(v) for v in S.inc_w],
        nodes=nodes,
        lp_solves=S.lp_solves,
        cuts=dict(sorted(S.cut_counts.items())),
        root_value=root_user,
        root_gap_pct=_gap_pct(obj, root_user),
        end_gap_pct=0.0 if status == "optimal" else _gap_pct(obj, best_bound),
        time_s=elapsed,
        cut_family=cfg.cut_family,
        audit_violations=S.audit() if cfg.audit else None,
    )
