"""Lifting orders: partial ascending permutations and frontier sets.

A permutation ``delta`` is a tuple of canonical item indices.  It is
*partial ascending* when items of each block appear in increasing index
order; the set of those permutations generates every LEPI.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import GubInstance

ABSENT = -1


def check_permutation(delta: Sequence[int], n: int) -> tuple:
    delta = tuple(int(i) for i in delta)
    if sorted(delta) != list(range(n)):
        raise ValueError(f"{delta} is not a permutation of range({n})")
    return delta


def is_partial_ascending(inst: GubInstance, delta: Sequence[int]) -> bool:
    last = [ABSENT] * inst.t
    for i in delta:
        k = inst.block_of[i]
        if i < last[k]:
            return False
        last[k] = i
    return True


@dataclass(frozen=True)
class FrontierSets:
    """U_j, h_j and W_j for every position j of a permutation (0-based).

    ``U[j]`` holds one slot per block (ABSENT when the block has no item
    among the first j+1 positions); ``h[j]`` is a position; ``W[j]`` is a
    frozenset of items.
    """

    delta: tuple
    U: tuple
    h: tuple
    W: tuple

    def U_set(self, j: int) -> frozenset:
        return frozenset(i for i in self.U[j] if i != ABSENT)

    def collection(self) -> frozenset:
        return frozenset(self.W)


def frontier_sets(inst: GubInstance, delta: Sequence[int]) -> FrontierSets:
    delta = check_permutation(delta, inst.n)
    slots = [ABSENT] * inst.t
    U, h, W = [], [], []
    for j, item in enumerate(delta):
        k = inst.block_of[item]
        if item > slots[k]:
            slots[k] = item
            hj = j
        else:
            # first earlier position holding a larger item of the same block
            hj = next(l for l in range(j) if delta[l] > item and inst.block_of[delta[l]] == k)
        U.append(tuple(slots))
        h.append(hj)
        Uh = U[hj]
        W.append(frozenset(i for i in Uh if i != ABSENT and i != delta[hj]) | {item})
    return FrontierSets(delta, tuple(U), tuple(h), tuple(W))


def make_partial_ascending(inst: GubInstance, delta: Sequence[int]) -> tuple:
    """Move every out-of-order item right before the first larger item of its block.

    The output is partial ascending and has the same W-collection as the input.
    """
    perm = list(check_permutation(delta, inst.n))
    for j in range(inst.n):
        item = perm[j]
        k = inst.block_of[item]
        target = None
        for l in range(j):
            if perm[l] > item and inst.block_of[perm[l]] == k:
                target = l
                break
        if target is not None:
            perm.pop(j)
            perm.insert(target, item)
    return tuple(perm)


def ascending_from_scores(inst: GubInstance, y: Sequence) -> tuple:
    """A partial ascending permutation sorted by non-increasing ``y``.

    Sort descending (stable), then relabel the r-th item taken from a block
    as that block's r-th smallest item.  When ``y`` is non-increasing inside
    each block the relabelled order is still sorted.
    """
    order = sorted(range(inst.n), key=lambda i: -y[i])
    taken = [0] * inst.t
    out = []
    for i in order:
        k = inst.block_of[i]
        out.append(inst.blocks[k][0] + taken[k])
        taken[k] += 1
    return tuple(out)


def block_identity(inst: GubInstance) -> tuple:
    return tuple(range(inst.n))
