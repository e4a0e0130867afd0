"""Exact oracles for Max-Rep / Min-Rep and the simple algorithms built on labelings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import (
    Instance,
    Labeling,
    Multilabeling,
    eval_labeling,
    satisfied_mask,
    singleton_lift,
)
from .rng import TAG_RANDOM_LABELING, TAG_ROUND, Stream, derive

MAXREP_BUDGET = 10_000_000
MINREP_BUDGET = 2_000_000
MINREP_MAX_SIGMA = 10
_CHUNK = 1 << 15


@dataclass(frozen=True)
class SolveResult:
    objective: Fraction | int
    witness: Labeling | Multilabeling
    nodes_explored: int
    proved_optimal: bool


def _edges_by_b(inst: Instance) -> list[list[int]]:
    groups: list[list[int]] = [[] for _ in range(inst.n_b)]
    for i, (_, b, _) in enumerate(inst.edges):
        groups[b].append(i)
    return groups


def maxrep_exact(inst: Instance, budget: int = MAXREP_BUDGET) -> SolveResult:
    """Best labeling by enumerating the A side only.

    Constraints project A onto B, so once the A labels are fixed every ``b``
    independently takes the most frequent projected symbol among its edges.
    ``nodes_explored`` counts A-side assignments; the first (lexicographic)
    optimum wins ties.
    """
    sigma, n_a = inst.sigma, inst.n_a
    if not inst.edges:
        return SolveResult(Fraction(1), Labeling([0] * n_a, [0] * inst.n_b), 1, True)
    total = sigma**n_a
    limit = min(total, budget)
    groups = [g for g in _edges_by_b(inst) if g]
    ea, tables = inst.edge_a, inst.tables
    powers = sigma ** np.arange(n_a - 1, -1, -1, dtype=np.int64)

    best_score, best_index = -1, 0
    for lo in range(0, limit, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, limit), dtype=np.int64)
        labels = (idx[:, None] // powers[None, :]) % sigma
        rows = np.arange(len(idx))
        score = np.zeros(len(idx), dtype=np.int64)
        for group in groups:
            counts = np.zeros((len(idx), sigma), dtype=np.int64)
            for e in group:
                np.add.at(counts, (rows, tables[e][labels[:, ea[e]]]), 1)
            score += counts.max(axis=1)
        top = int(score.argmax())
        if score[top] > best_score:
            best_score, best_index = int(score[top]), lo + top

    labels_a = [int(x) for x in (best_index // powers) % sigma]
    labels_b = [0] * inst.n_b
    for b, group in enumerate(_edges_by_b(inst)):
        if group:
            votes = np.bincount(
                [inst.edges[e][2][labels_a[inst.edges[e][0]]] for e in group], minlength=sigma
            )
            labels_b[b] = int(votes.argmax())
    witness = Labeling(labels_a, labels_b)
    value = eval_labeling(inst, witness).value
    return SolveResult(value, witness, limit, limit == total)


# -- Min-Rep branch and bound -------------------------------------------------
#
# Label sets are bitmasks over the alphabet. For each b we keep ``adm[b]``, a
# bitset over all 2**sigma candidate sets T of b, marking those that hit the
# projection of every already-fixed neighbour's set. The cheapest admissible
# T is an exact lower bound for b that only grows as more A vertices are fixed.


@lru_cache(maxsize=None)
def _subset_tables(sigma: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Popcounts, per-size level bitsets, and hitter bitsets for every mask."""
    full = 1 << sigma
    popcount = tuple(bin(t).count("1") for t in range(full))
    levels = [0] * (sigma + 1)
    for t in range(full):
        levels[popcount[t]] |= 1 << t
    hitters = tuple(
        sum(1 << t for t in range(full) if t & mask) for mask in range(full)
    )
    return popcount, tuple(levels), hitters


def _cheapest(adm: int, levels: tuple[int, ...]) -> tuple[int, int]:
    for k, level in enumerate(levels):
        hit = adm & level
        if hit:
            return k, (hit & -hit).bit_length() - 1
    raise AssertionError("no admissible label set")


def _images(table: tuple[int, ...], sigma: int) -> list[int]:
    img = [0] * (1 << sigma)
    for s in range(1, 1 << sigma):
        low = (s & -s).bit_length() - 1
        img[s] = img[s & (s - 1)] | (1 << table[low])
    return img


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _search_order(nbrs: dict[int, list]) -> list[int]:
    # descending degree; ties go to the vertex sharing most B neighbours with
    # those already placed, so B bounds close early
    order: list[int] = []
    seen_b: set[int] = set()
    left = set(nbrs)
    while left:
        a = min(
            left,
            key=lambda v: (-len(nbrs[v]), -sum(b in seen_b for b, _ in nbrs[v]), v),
        )
        order.append(a)
        left.remove(a)
        seen_b.update(b for b, _ in nbrs[a])
    return order


def minrep_exact(inst: Instance, budget: int = MINREP_BUDGET) -> SolveResult:
    """Minimum-cost multilabeling satisfying every edge.

    Depth-first branch and bound over label sets of the non-isolated A
    vertices (descending degree), each B vertex being solved exactly as a
    small hitting-set problem. Isolated vertices get empty sets. Starts from
    the :func:`trivial_minrep` solution as incumbent.
    """
    sigma = inst.sigma
    if sigma > MINREP_MAX_SIGMA:
        raise ValueError(f"minrep_exact supports sigma <= {MINREP_MAX_SIGMA}")
    incumbent = trivial_minrep(inst)
    if not inst.edges:
        return SolveResult(0, incumbent, 0, True)

    popcount, levels, hitters = _subset_tables(sigma)
    full_sets = 1 << sigma
    nonempty = sorted(range(1, full_sets), key=lambda t: (popcount[t], t))
    lb_memo: dict[int, int] = {}

    def lower(adm_bits: int) -> int:
        k = lb_memo.get(adm_bits)
        if k is None:
            k = lb_memo[adm_bits] = _cheapest(adm_bits, levels)[0]
        return k

    nbrs: dict[int, list[tuple[int, list[int]]]] = {}
    for a, b, table in inst.edges:
        nbrs.setdefault(a, []).append((b, _images(table, sigma)))
    order = _search_order(nbrs)
    b_live = sorted({b for _, b, _ in inst.edges})

    adm = [0] * inst.n_b
    for b in b_live:
        adm[b] = ((1 << full_sets) - 1) & ~1
    chosen: dict[int, int] = {}

    best_cost = incumbent.cost
    best: tuple[dict[int, int], dict[int, int]] | None = None
    nodes = 0
    exhausted = False

    def search(depth: int, cost_a: int, lb_b: int) -> None:
        nonlocal best_cost, best, nodes, exhausted
        if depth == len(order):
            if cost_a + lb_b < best_cost:
                best_cost = cost_a + lb_b
                best = (dict(chosen), {b: _cheapest(adm[b], levels)[1] for b in b_live})
            return
        a = order[depth]
        edges_a = nbrs[a]
        base = cost_a + len(order) - depth - 1 + lb_b
        for s in nonempty:
            size = popcount[s]
            if base + size >= best_cost:
                break  # candidate sets come in nondecreasing size
            nodes += 1
            if nodes > budget:
                exhausted = True
                return
            saved = []
            delta_b = 0
            for b, img in edges_a:
                old = adm[b]
                new = old & hitters[img[s]]
                if new != old:
                    saved.append((b, old))
                    adm[b] = new
                    delta_b += lower(new) - lower(old)
            if base + size + delta_b < best_cost:
                chosen[a] = s
                search(depth + 1, cost_a + size, lb_b + delta_b)
                del chosen[a]
            for b, old in saved:
                adm[b] = old
            if exhausted:
                return

    search(0, 0, len(b_live))

    if best is None:
        witness = incumbent
    else:
        sets_a = [frozenset()] * inst.n_a
        sets_b = [frozenset()] * inst.n_b
        for a, s in best[0].items():
            sets_a[a] = _mask_to_set(s)
        for b, t in best[1].items():
            sets_b[b] = _mask_to_set(t)
        witness = Multilabeling(tuple(sets_a), tuple(sets_b))
    return SolveResult(witness.cost, witness, nodes, not exhausted)


def trivial_minrep(inst: Instance) -> Multilabeling:
    """Symbol 0 at ``a`` and its projection at ``b``, for every edge.

    Cost is at most max degree times the number of non-isolated vertices,
    which is the max-degree approximation for Min-Rep.
    """
    sets_a: list[set[int]] = [set() for _ in range(inst.n_a)]
    sets_b: list[set[int]] = [set() for _ in range(inst.n_b)]
    for a, b, table in inst.edges:
        sets_a[a].add(0)
        sets_b[b].add(table[0])
    return Multilabeling(tuple(map(frozenset, sets_a)), tuple(map(frozenset, sets_b)))


def random_labeling(inst: Instance, seed: int) -> Labeling:
    stream = Stream(derive(seed, TAG_RANDOM_LABELING))
    labels_a = [stream.randbelow(inst.sigma) for _ in range(inst.n_a)]
    labels_b = [stream.randbelow(inst.sigma) for _ in range(inst.n_b)]
    return Labeling(labels_a, labels_b)


def round_multilabeling(inst: Instance, psi: Multilabeling, seed: int) -> Labeling:
    """Uniform member of each ``psi(v)``; empty sets fall back to symbol 0."""
    psi.check(inst)
    stream = Stream(derive(seed, TAG_ROUND))

    def pick(s: frozenset[int]) -> int:
        if not s:
            return 0
        members = sorted(s)
        return members[stream.randbelow(len(members))]

    return Labeling([pick(s) for s in psi.sets_a], [pick(s) for s in psi.sets_b])


def repair_multilabeling(inst: Instance, phi: Labeling) -> Multilabeling:
    """Lift ``phi`` to singletons, then patch each violated edge with symbol 0."""
    phi.check(inst)
    sets_a = [{s} for s in phi.labels_a]
    sets_b = [{s} for s in phi.labels_b]
    sat = satisfied_mask(inst, phi)
    for ok, (a, b, table) in zip(sat, inst.edges):
        if not ok:
            sets_a[a].add(0)
            sets_b[b].add(table[0])
    return Multilabeling(tuple(map(frozenset, sets_a)), tuple(map(frozenset, sets_b)))


__all__ = [
    "SolveResult",
    "maxrep_exact",
    "minrep_exact",
    "random_labeling",
    "repair_multilabeling",
    "round_multilabeling",
    "singleton_lift",
    "trivial_minrep",
]
