"""The sparsification pipeline: parameters, copy amplification, subsampling, trimming."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from sympy import factorint

from .core import Instance
from .rng import TAG_SUBSAMPLE, derive, uniform_array

C_DELTA = 1e6
C_P = 1e-4
GUARD_RATIO = 1e4
MAX_AMPLIFIED_EDGES = 50_000_000


@dataclass(frozen=True)
class SparsifyParams:
    """Degree bound ``delta`` and sampling probability ``p = c_p * delta / D``.

    ``p`` and ``D`` stay ``None`` until bound to an instance degree with
    :meth:`for_degree`.
    """

    delta: int
    gamma: float
    c_delta: float = C_DELTA
    c_p: float = C_P
    guard_ratio: float = GUARD_RATIO
    p: float | None = None
    D: int | None = None

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.p is not None and not 0 <= self.p <= 1:
            raise ValueError(f"sampling probability must lie in [0, 1], got {self.p}")

    @property
    def trim_slack(self) -> float:
        """``1/delta + p*D/delta``: Markov bound on Pr[endpoint trimmed | edge kept]."""
        return 1 / self.delta + self.c_p

    def for_degree(self, D: int) -> "SparsifyParams":
        if D < 1:
            raise ValueError("degree must be >= 1")
        return replace(self, p=self.c_p * self.delta / D, D=D)


def compute_params(
    sigma: int,
    gamma: float,
    *,
    c_delta: float = C_DELTA,
    c_p: float = C_P,
    guard_ratio: float = GUARD_RATIO,
    delta: int | None = None,
) -> SparsifyParams:
    """``delta = ceil(c_delta * 2 ln(2 sigma) / sqrt(gamma))`` unless given explicitly."""
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    if delta is None:
        delta = math.ceil(c_delta * 2 * math.log(2 * sigma) / math.sqrt(gamma))
    return SparsifyParams(
        delta=int(delta), gamma=gamma, c_delta=c_delta, c_p=c_p, guard_ratio=guard_ratio
    )


def is_prime_power(q: int) -> bool:
    return q >= 2 and len(factorint(q)) == 1


@dataclass(frozen=True)
class GapParams:
    g: int
    big_c: float
    q: int
    gamma: float
    delta: int
    eps: float
    # min{eps, C ln q / q}; recorded only, nothing depends on it
    chan_delta: float

    @property
    def alphabet_size(self) -> int:
        return self.q * self.q


def _smallest_prime_power_above(target: float) -> int:
    """Least prime power ``q`` with ``q / ln q > target``."""
    if 2 / math.log(2) > target:
        return 2
    # q / ln q increases on [e, inf); bisect for the crossing, then walk up.
    lo, hi = 3.0, 4.0
    while hi / math.log(hi) <= target:
        lo, hi = hi, hi * 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid / math.log(mid) > target:
            hi = mid
        else:
            lo = mid
    q = max(3, math.floor(lo))
    while not (q / math.log(q) > target and is_prime_power(q)):
        q += 1
    return q


def instantiate_gap_params(g: int, big_c: float) -> GapParams:
    if g < 2:
        raise ValueError("gap g must be an integer > 1")
    if big_c <= 0:
        raise ValueError("big_c must be positive")
    q = _smallest_prime_power_above(1e5 * big_c * g * g)
    if q > 1e7 * big_c * g * g * math.log(g * g + 2):
        raise RuntimeError(f"q = {q} escapes the Theta(g^2 log g) band")
    gamma = 2 * big_c * math.log(q) / q
    if not gamma < 1:
        raise ValueError(f"gamma = {gamma} >= 1; big_c too large for this gap")
    delta = compute_params(q * q, gamma).delta
    eps = 1 / delta
    return GapParams(
        g=g,
        big_c=big_c,
        q=q,
        gamma=gamma,
        delta=delta,
        eps=eps,
        chan_delta=min(eps, big_c * math.log(q) / q),
    )


def amplify_copies(inst: Instance, t: int) -> Instance:
    """``t`` copies of each side; copy ``i`` of vertex ``v`` gets index ``v*t + i``.

    Every edge ``(a, b)`` becomes the ``t*t`` edges ``((a,i), (b,j))`` with the
    same table, so degrees multiply by ``t``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if t * t * inst.num_edges > MAX_AMPLIFIED_EDGES:
        raise ValueError(f"amplified instance would have {t * t * inst.num_edges} edges")
    edges = [
        (a * t + i, b * t + j, table)
        for a, b, table in inst.edges
        for i in range(t)
        for j in range(t)
    ]
    edges.sort(key=lambda e: (e[0], e[1]))
    return Instance._trusted(inst.n_a * t, inst.n_b * t, inst.sigma, tuple(edges))


def subsample_mask(num_edges: int, p: float, seed: int) -> np.ndarray:
    """Keep edge ``i`` iff its uniform draw is below ``p``.

    One draw per canonical edge position, so masks for ``p1 <= p2`` nest.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return uniform_array(derive(seed, TAG_SUBSAMPLE), num_edges) < p


def subsample(inst: Instance, p: float, seed: int) -> Instance:
    return inst.subset(subsample_mask(inst.num_edges, p, seed))


@dataclass(frozen=True)
class TrimResult:
    instance: Instance
    removed_edges: int
    trimmed_vertices_a: int
    trimmed_vertices_b: int


def trim_mask(inst: Instance, delta: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges to keep plus the over-degree masks on A and B (degrees of ``inst``)."""
    heavy_a = inst.deg_a > delta
    heavy_b = inst.deg_b > delta
    if not inst.edges:
        return np.zeros(0, dtype=bool), heavy_a, heavy_b
    keep = ~(heavy_a[inst.edge_a] | heavy_b[inst.edge_b])
    return keep, heavy_a, heavy_b


def trim(inst: Instance, delta: int) -> TrimResult:
    """Drop every edge with an endpoint of degree above ``delta`` (single pass)."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    keep, heavy_a, heavy_b = trim_mask(inst, delta)
    return TrimResult(
        instance=inst.subset(keep),
        removed_edges=int(inst.num_edges - np.count_nonzero(keep)),
        trimmed_vertices_a=int(np.count_nonzero(heavy_a)),
        trimmed_vertices_b=int(np.count_nonzero(heavy_b)),
    )


@dataclass(frozen=True, eq=False)
class SparsifyOutput:
    intermediate: Instance
    trimmed: Instance
    params: SparsifyParams
    removed_edges: int
    trimmed_vertices_a: int
    trimmed_vertices_b: int
    kept_mask: np.ndarray
    final_mask: np.ndarray

    def summary(self) -> dict:
        params = self.params
        return {
            "delta": params.delta,
            "p": params.p,
            "D": params.D,
            "gamma": params.gamma,
            "c_delta": params.c_delta,
            "c_p": params.c_p,
            "guard_ratio": params.guard_ratio,
            "intermediate_edges": self.intermediate.num_edges,
            "trimmed_edges": self.trimmed.num_edges,
            "removed_edges": self.removed_edges,
            "trimmed_vertices_a": self.trimmed_vertices_a,
            "trimmed_vertices_b": self.trimmed_vertices_b,
        }


def regular_degree(inst: Instance) -> int:
    """Common degree ``D`` of a regular instance; raises otherwise."""
    if not inst.edges:
        raise ValueError("instance has no edges")
    degrees = np.concatenate([inst.deg_a, inst.deg_b])
    if not (degrees == degrees[0]).all():
        raise ValueError(
            f"sparsify needs a regular instance; degrees range over "
            f"[{degrees.min()}, {degrees.max()}]"
        )
    return int(degrees[0])


def sparsify_with(inst: Instance, params: SparsifyParams, seed: int) -> SparsifyOutput:
    """Subsample and trim with already-derived parameters.

    ``params`` must be bound to the instance degree (``params.p`` set).
    """
    if params.p is None:
        raise ValueError("params are not bound to an instance degree")
    kept = subsample_mask(inst.num_edges, params.p, seed)
    intermediate = inst.subset(kept)
    keep, heavy_a, heavy_b = trim_mask(intermediate, params.delta)
    final = np.zeros(inst.num_edges, dtype=bool)
    final[np.flatnonzero(kept)[keep]] = True
    return SparsifyOutput(
        intermediate=intermediate,
        trimmed=intermediate.subset(keep),
        params=params,
        removed_edges=int(intermediate.num_edges - np.count_nonzero(keep)),
        trimmed_vertices_a=int(np.count_nonzero(heavy_a)),
        trimmed_vertices_b=int(np.count_nonzero(heavy_b)),
        kept_mask=kept,
        final_mask=final,
    )


def bind_params(inst: Instance, params: SparsifyParams) -> SparsifyParams:
    """Bind ``params`` to the degree of ``inst``, enforcing ``D >= guard_ratio * delta``."""
    D = regular_degree(inst)
    if D < params.guard_ratio * params.delta:
        need = math.ceil(params.guard_ratio * params.delta)
        raise ValueError(
            f"degree guard violated: D = {D} but D >= {params.guard_ratio:g} * delta "
            f"requires D >= {need}"
        )
    return params.for_degree(D)


def sparsify(
    inst: Instance,
    gamma: float,
    seed: int,
    *,
    c_delta: float = C_DELTA,
    c_p: float = C_P,
    guard_ratio: float = GUARD_RATIO,
    delta: int | None = None,
) -> SparsifyOutput:
    """Full reduction on a regular instance: derive ``(delta, p)``, subsample, trim."""
    params = compute_params(
        inst.sigma, gamma, c_delta=c_delta, c_p=c_p, guard_ratio=guard_ratio, delta=delta
    )
    return sparsify_with(inst, bind_params(inst, params), seed)
