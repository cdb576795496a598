"""Direct minimisation of d*w + c'x over X0 in O(n^3).

For d > 0 the problem is min_S d*f(a(S)) + c(S) over GUB-feasible S.  The
objective is concave in (a(S), c(S)), so an optimum sits at an extreme
point of conv{(a(S), c(S))}.  Every extreme point minimises some linear
direction, and directions only need to be sampled between the finitely
many ratios where the per-block argmin or its sign can change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import GubInstance


@dataclass(frozen=True)
class LinResult:
    status: str  # "optimal" | "unbounded"
    value: object = None
    support: Optional[frozenset] = None
    w: object = None
    candidates: int = 0


def _direction_solution(inst: GubInstance, la, lc, c) -> frozenset:
    """Support minimising la*a(S) + lc*c(S); ties go to the smallest index."""
    S = []
    for lo, hi in inst.blocks:
        best, arg = None, None
        for i in range(lo, hi):
            s = la * inst.a[i] + lc * c[i]
            if best is None or s < best:
                best, arg = s, i
        if best < 0:
            S.append(arg)
    return frozenset(S)


def breakpoints(inst: GubInstance, a: Sequence, c: Sequence) -> list:
    """Sorted distinct ratios theta where a_i + theta*c_i changes order or sign within a block."""
    theta = set()
    for lo, hi in inst.blocks:
        for i in range(lo, hi):
            if c[i] != 0:
                theta.add(-a[i] / c[i])
            for j in range(i + 1, hi):
                if c[j] != c[i]:
                    theta.add((a[i] - a[j]) / (c[j] - c[i]))
    return sorted(theta)


def sample_ratios(theta: list) -> list:
    """One ratio per open interval cut out by ``theta``."""
    if not theta:
        return [0]
    mids = [theta[0] - 1]
    mids.extend((lo + hi) / 2 for lo, hi in zip(theta, theta[1:]))
    mids.append(theta[-1] + 1)
    return mids


def candidate_supports(inst: GubInstance, c: Sequence) -> list:
    """Candidate optimal supports from all direction cases, in a fixed order."""
    out = [
        _direction_solution(inst, 0, 1, c),
        _direction_solution(inst, 0, -1, c),
    ]
    for sign in (1, -1):
        a_signed = [sign * v for v in inst.a]
        for th in sample_ratios(breakpoints(inst, a_signed, c)):
            out.append(_direction_solution(inst, sign, th, c))
    return out


def optimize_linear(inst: GubInstance, d, c: Sequence) -> LinResult:
    """min d*w + c'x over X0 (b is ignored; use :func:`optimize_linear_X` for X)."""
    if len(c) != inst.n:
        raise ValueError(f"c has length {len(c)}, expected {inst.n}")
    if d < 0:
        return LinResult("unbounded")
    if d == 0:
        S = _direction_solution(inst, 0, 1, c)
        value = sum((c[i] for i in S), 0)
        return LinResult("optimal", value, S, inst.value(S), 1)
    best = None
    cands = candidate_supports(inst, c)
    for S in cands:
        fa = inst.value(S)
        v = d * fa + sum((c[i] for i in S), 0)
        if best is None or v < best[0]:
            best = (v, S, fa)
    return LinResult("optimal", best[0], best[1], best[2], len(cands))


def optimize_linear_X(inst: GubInstance, d, c: Sequence) -> LinResult:
    """min d*w + c'x over X: substitute w = w0 + b'x and solve over X0."""
    if inst.b is None:
        return optimize_linear(inst, d, c)
    c0 = [ci + d * bi for ci, bi in zip(c, inst.b)]
    res = optimize_linear(inst.without_b(), d, c0)
    if res.status != "optimal":
        return res
    w = res.w + sum((inst.b[i] for i in res.support), 0)
    return LinResult("optimal", res.value, res.support, w, res.candidates)
