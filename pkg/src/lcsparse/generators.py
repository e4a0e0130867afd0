"""Seeded generators for regular Label Cover instances with controlled value."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import Edge, Instance, Labeling, eval_labeling
from .rng import TAG_CORRUPT, TAG_GRAPH, TAG_LABELS, TAG_TABLES, Stream

Kind = Literal["planted", "corrupted", "random"]

MATCHING_RETRIES = 10


@dataclass(frozen=True)
class GenSpec:
    n: int
    deg: int
    sigma: int
    kind: Kind = "planted"
    eps: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("planted", "corrupted", "random"):
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if not 1 <= self.deg <= self.n:
            raise ValueError(f"need 1 <= deg <= n, got deg={self.deg}, n={self.n}")
        if self.sigma < 1:
            raise ValueError("sigma must be >= 1")
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")


def _complement_matching(adj: np.ndarray, stream: Stream) -> list[int]:
    # The complement of a k-regular bipartite graph on n+n vertices is
    # (n-k)-regular, so it always has a perfect matching (Hall).
    n = adj.shape[0]
    row_perm = list(range(n))
    col_perm = list(range(n))
    stream.shuffle(row_perm)
    stream.shuffle(col_perm)
    free = ~adj[np.ix_(row_perm, col_perm)]
    match = maximum_bipartite_matching(csr_matrix(free.astype(np.int8)), perm_type="column")
    if (match < 0).any():
        raise RuntimeError("complement has no perfect matching; graph is not regular")
    perm = [0] * n
    for i, j in enumerate(match):
        perm[row_perm[i]] = col_perm[int(j)]
    return perm


def gen_regular_bipartite(n: int, deg: int, seed: int) -> list[tuple[int, int]]:
    """Edges of a simple ``deg``-regular bipartite graph on ``n + n`` vertices.

    Union of ``deg`` perfect matchings. Each matching is a uniformly random
    permutation, resampled on collision with earlier matchings; after
    ``MATCHING_RETRIES`` collisions it is taken as a perfect matching of the
    randomly relabelled complement graph instead, which always exists.
    """
    if not 1 <= deg <= n:
        raise ValueError(f"need 1 <= deg <= n, got deg={deg}, n={n}")
    stream = Stream.from_seed(seed, TAG_GRAPH)
    adj = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)
    for _ in range(deg):
        for _attempt in range(MATCHING_RETRIES):
            perm = list(range(n))
            stream.shuffle(perm)
            if not adj[rows, perm].any():
                break
        else:
            perm = _complement_matching(adj, stream)
        adj[rows, perm] = True
    a_idx, b_idx = np.nonzero(adj)
    return [(int(a), int(b)) for a, b in zip(a_idx, b_idx)]


def _uniform_labeling(n: int, sigma: int, seed: int) -> Labeling:
    stream = Stream.from_seed(seed, TAG_LABELS)
    labels_a = [stream.randbelow(sigma) for _ in range(n)]
    labels_b = [stream.randbelow(sigma) for _ in range(n)]
    return Labeling(labels_a, labels_b)


def gen_planted(spec: GenSpec) -> tuple[Instance, Labeling]:
    """Instance with a hidden labeling that satisfies every constraint."""
    graph = gen_regular_bipartite(spec.n, spec.deg, spec.seed)
    phi = _uniform_labeling(spec.n, spec.sigma, spec.seed)
    stream = Stream.from_seed(spec.seed, TAG_TABLES)
    edges: list[Edge] = []
    for a, b in graph:
        table = [stream.randbelow(spec.sigma) for _ in range(spec.sigma)]
        table[phi.labels_a[a]] = phi.labels_b[b]
        edges.append((a, b, tuple(table)))
    return Instance._trusted(spec.n, spec.n, spec.sigma, tuple(edges)), phi


def gen_random(spec: GenSpec) -> Instance:
    """Instance whose tables are independent and uniform."""
    graph = gen_regular_bipartite(spec.n, spec.deg, spec.seed)
    stream = Stream.from_seed(spec.seed, TAG_TABLES)
    edges = [
        (a, b, tuple(stream.randbelow(spec.sigma) for _ in range(spec.sigma)))
        for a, b in graph
    ]
    return Instance._trusted(spec.n, spec.n, spec.sigma, tuple(edges))


def corruption_count(eps: float, num_edges: int) -> int:
    """``ceil(eps * |E|)`` evaluated on the decimal value of ``eps``."""
    frac = Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps)
    return math.ceil(frac * num_edges)


def corrupt(inst: Instance, phi_star: Labeling, eps: float, seed: int) -> Instance:
    """Break exactly ``ceil(eps*|E|)`` constraints of a perfect labeling.

    For each chosen edge only the entry at ``phi_star(a)`` changes, to a
    uniform symbol different from ``phi_star(b)``.
    """
    if inst.sigma < 2:
        raise ValueError("cannot corrupt an instance with sigma < 2")
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    report = eval_labeling(inst, phi_star)
    if report.satisfied_count != report.total_edges:
        raise ValueError("phi_star must satisfy every edge of the instance")
    k = corruption_count(eps, inst.num_edges)
    if k == 0:
        return inst
    stream = Stream.from_seed(seed, TAG_CORRUPT)
    edges = list(inst.edges)
    for i in stream.sample_indices(inst.num_edges, k):
        a, b, table = edges[i]
        good = phi_star.labels_b[b]
        r = stream.randbelow(inst.sigma - 1)
        new = list(table)
        new[phi_star.labels_a[a]] = r if r < good else r + 1
        edges[i] = (a, b, tuple(new))
    return Instance._trusted(inst.n_a, inst.n_b, inst.sigma, tuple(edges))


def generate(spec: GenSpec) -> tuple[Instance, Labeling | None]:
    """Dispatch on ``spec.kind``; returns the planted labeling when there is one."""
    if spec.kind == "random":
        return gen_random(spec), None
    inst, phi = gen_planted(spec)
    if spec.kind == "corrupted":
        inst = corrupt(inst, phi, spec.eps, spec.seed)
    return inst, phi
