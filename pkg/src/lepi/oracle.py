"""Brute-force ground truth for desk-sized instances.

Nothing here is clever on purpose: every answer comes from enumerating
supports, permutations or binary assignments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import GubInstance
from .lifting import lepi_coefficients_general

MAX_FAMILY = 10**6
MAX_MEMBERSHIP_N = 8
MAX_BINARIES = 22


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class FeasibleFamily:
    """All S with at most one item per block, with a(S) and f(a(S))."""

    sets: tuple
    a_values: tuple
    f_values: tuple

    def __len__(self):
        return len(self.sets)


def family_size(inst: GubInstance) -> int:
    out = 1
    for lo, hi in inst.blocks:
        out *= hi - lo + 1
    return out


def enumerate_feasible(inst: GubInstance) -> FeasibleFamily:
    if family_size(inst) > MAX_FAMILY:
        raise TooLarge(f"{family_size(inst)} supports exceed {MAX_FAMILY}")
    choices = [[None] + list(range(lo, hi)) for lo, hi in inst.blocks]
    sets = []
    for pick in itertools.product(*choices):
        sets.append(tuple(i for i in pick if i is not None))
    sets.sort()
    a_values = tuple(inst.a_of(S) for S in sets)
    return FeasibleFamily(tuple(sets), a_values, tuple(inst.f(z) for z in a_values))


def lifting_oracle(inst: GubInstance, delta: Sequence[int], j: int, eta_prefix: Sequence,
                   family: FeasibleFamily = None):
    """Lifting coefficient of position j (0-based) by enumeration.

    ``eta_prefix[r]`` is the coefficient already fixed for ``delta[r]``, r < j.
    Returns min f(a(S)) - sum_{i in S, i != delta[j]} eta_i over feasible
    S within the first j+1 items that contain delta[j].
    """
    family = family or enumerate_feasible(inst)
    eta = {delta[r]: eta_prefix[r] for r in range(j)}
    allowed = set(delta[: j + 1])
    target = delta[j]
    best = None
    for S, fv in zip(family.sets, family.f_values):
        if target not in S or not allowed.issuperset(S):
            continue
        v = fv - sum((eta[i] for i in S if i != target), 0)
        if best is None or v < best:
            best = v
    return best


def lifting_oracle_all(inst: GubInstance, delta: Sequence[int], family: FeasibleFamily = None) -> tuple:
    """All lifting coefficients (item-indexed) by repeated brute-force lifting.

    Each support is charged to the position of its last item, so one pass
    over the family per permutation suffices.
    """
    family = family or enumerate_feasible(inst)
    pos = {item: r for r, item in enumerate(delta)}
    by_last = [[] for _ in delta]
    for S, fv in zip(family.sets, family.f_values):
        if S:
            by_last[max(pos[i] for i in S)].append((S, fv))
    coef = [0] * inst.n
    for j, target in enumerate(delta):
        best = None
        for S, fv in by_last[j]:
            v = fv - sum((coef[i] for i in S if i != target), 0)
            if best is None or v < best:
                best = v
        coef[target] = best
    return tuple(coef)


def partial_ascending_permutations(inst: GubInstance):
    """Yield every within-block-order-preserving interleaving of the blocks."""
    remaining = [list(range(lo, hi)) for lo, hi in inst.blocks]
    heads = [0] * inst.t
    prefix = []

    def rec():
        if len(prefix) == inst.n:
            yield tuple(prefix)
            return
        for k in range(inst.t):
            if heads[k] < len(remaining[k]):
                prefix.append(remaining[k][heads[k]])
                heads[k] += 1
                yield from rec()
                heads[k] -= 1
                prefix.pop()

    yield from rec()


def all_lepis(inst: GubInstance) -> dict:
    """Map partial ascending permutation -> LEPI coefficients (general path)."""
    return {d: lepi_coefficients_general(inst, d).coef for d in partial_ascending_permutations(inst)}


def distinct_lepis(inst: GubInstance) -> set:
    return set(all_lepis(inst).values())


def membership_oracle(inst: GubInstance, x: Sequence, w, tol=0, lepis=None) -> bool:
    """Bounds, GUB rows and every LEPI (LEPI' with b) over all partial ascending orders."""
    if inst.n > MAX_MEMBERSHIP_N and lepis is None:
        raise TooLarge(f"n = {inst.n} > {MAX_MEMBERSHIP_N}")
    if any(xi < -tol or xi > 1 + tol for xi in x):
        return False
    if any(sum(x[lo:hi], 0) > 1 + tol for lo, hi in inst.blocks):
        return False
    w0 = w
    if inst.b is not None:
        w0 = w - sum((bi * xi for bi, xi in zip(inst.b, x)), 0)
    if lepis is None:
        lepis = distinct_lepis(inst)
    for coef in lepis:
        if sum((c * xi for c, xi in zip(coef, x)), 0) > w0 + tol:
            return False
    return True


def brute_force_linear(inst: GubInstance, d, c: Sequence, family: FeasibleFamily = None):
    """min over S in the family of d*f(a(S)) + c(S); returns (value, S)."""
    family = family or enumerate_feasible(inst)
    best = None
    for S, fv in zip(family.sets, family.f_values):
        v = d * fv + sum((c[i] for i in S), 0)
        if best is None or v < best[0]:
            best = (v, S)
    return best


def exhaustive_solve(model, tol: float = 1e-7, chunk: int = 1 << 15):
    """Exact optimum of a bnc.Model by enumerating GUB-feasible binary vectors.

    Returns ``(objective, x)`` in the model's own sense, or ``(None, None)``
    when no assignment is feasible.
    """
    n = model.n_x
    if n == 0 and model.n_w == 0:
        return float(model.obj_const), np.zeros(0)
    groups = model.enumeration_groups()
    radices = np.array([len(g) + 1 for g in groups], dtype=np.int64)
    total = int(np.prod(radices)) if len(radices) else 1
    if total > 2**MAX_BINARIES:
        raise TooLarge(f"{total} assignments exceed 2^{MAX_BINARIES}")

    sign = 1.0 if model.sense == "min" else -1.0
    best_val, best_x = None, None
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        X = np.zeros((len(codes), n))
        rem = codes.copy()
        for g, r in zip(groups, radices):
            digit = rem % r
            rem //= r
            for pos, var in enumerate(g):
                X[:, var] = digit == pos + 1
        ok, W = model.evaluate_binaries(X, tol)
        if not ok.any():
            continue
        obj = model.objective_values(X, W)
        obj = np.where(ok, sign * obj, np.inf)
        r = int(np.argmin(obj))
        if best_val is None or obj[r] < best_val - 1e-12:
            best_val, best_x = obj[r], X[r].copy()
    if best_val is None:
        return None, None
    return sign * best_val, best_x
