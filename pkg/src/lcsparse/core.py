"""Label Cover instances, (multi)labelings, and their evaluators."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

Edge = tuple[int, int, tuple[int, ...]]


class ValidationError(ValueError):
    """Raised with every violated invariant collected in ``errors``."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Instance:
    """A projection-game instance on the bipartite graph ``(A, B, E)``.

    Symbols are ``0..sigma-1``. Each edge is ``(a, b, table)`` where
    ``table[s]`` is the projection of symbol ``s`` at ``a`` onto ``b``.
    Edges are kept sorted by ``(a, b)``; build through
    :func:`validate_instance` (or the constructor, which validates too).
    """

    n_a: int
    n_b: int
    sigma: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        checked = validate_instance(
            {"n_a": self.n_a, "n_b": self.n_b, "sigma": self.sigma, "edges": self.edges}
        )
        object.__setattr__(self, "edges", checked.edges)

    @classmethod
    def _trusted(cls, n_a: int, n_b: int, sigma: int, edges: tuple[Edge, ...]) -> "Instance":
        # caller guarantees canonical, valid edges (e.g. a subset of a valid instance)
        obj = object.__new__(cls)
        object.__setattr__(obj, "n_a", n_a)
        object.__setattr__(obj, "n_b", n_b)
        object.__setattr__(obj, "sigma", sigma)
        object.__setattr__(obj, "edges", edges)
        return obj

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def N(self) -> int:
        return self.n_a + self.n_b

    @property
    def n(self) -> int:
        """Vertices per side; only defined for balanced instances."""
        if self.n_a != self.n_b:
            raise ValueError("n is defined only when |A| = |B|")
        return self.n_a

    @cached_property
    def edge_a(self) -> np.ndarray:
        return np.fromiter((e[0] for e in self.edges), dtype=np.int64, count=len(self.edges))

    @cached_property
    def edge_b(self) -> np.ndarray:
        return np.fromiter((e[1] for e in self.edges), dtype=np.int64, count=len(self.edges))

    @cached_property
    def tables(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, self.sigma), dtype=np.int64)
        return np.array([e[2] for e in self.edges], dtype=np.int64)

    @cached_property
    def deg_a(self) -> np.ndarray:
        return np.bincount(self.edge_a, minlength=self.n_a)

    @cached_property
    def deg_b(self) -> np.ndarray:
        return np.bincount(self.edge_b, minlength=self.n_b)

    def non_isolated_count(self) -> int:
        return int(np.count_nonzero(self.deg_a) + np.count_nonzero(self.deg_b))

    def subset(self, keep: np.ndarray) -> "Instance":
        """Same vertices and alphabet, only the edges where ``keep`` is true."""
        idx = np.flatnonzero(keep)
        edges = self.edges
        return Instance._trusted(self.n_a, self.n_b, self.sigma, tuple(edges[i] for i in idx))

    def with_edges(self, edges: Iterable[Edge]) -> "Instance":
        return Instance(self.n_a, self.n_b, self.sigma, tuple(edges))


def validate_instance(candidate: Mapping[str, Any]) -> Instance:
    """Check raw instance data and return it in canonical form.

    Raises :class:`ValidationError` listing every problem found.
    """
    errors: list[str] = []
    try:
        n_a = int(candidate["n_a"])
        n_b = int(candidate["n_b"])
        sigma = int(candidate["sigma"])
        raw_edges = list(candidate["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError([f"malformed instance data: {exc!r}"]) from None

    if sigma < 1:
        errors.append(f"sigma must be >= 1, got {sigma}")
    if n_a < 1:
        errors.append(f"n_a must be >= 1, got {n_a}")
    if n_b < 1:
        errors.append(f"n_b must be >= 1, got {n_b}")

    edges: list[Edge] = []
    seen: dict[tuple[int, int], int] = {}
    for i, raw in enumerate(raw_edges):
        try:
            a, b, table = raw
            a, b = int(a), int(b)
            table = tuple(int(t) for t in table)
        except (TypeError, ValueError):
            errors.append(f"edge {i}: malformed edge record")
            continue
        bad = False
        if not 0 <= a < n_a:
            errors.append(f"edge {i}: a index out of range ({a} not in [0, {n_a}))")
            bad = True
        if not 0 <= b < n_b:
            errors.append(f"edge {i}: b index out of range ({b} not in [0, {n_b}))")
            bad = True
        if len(table) != sigma:
            errors.append(f"edge {i}: table length != sigma ({len(table)} != {sigma})")
            bad = True
        elif any(not 0 <= t < sigma for t in table):
            errors.append(f"edge {i}: table entry out of range")
            bad = True
        if (a, b) in seen:
            errors.append(f"edge {i}: duplicate edge ({a}, {b}), first seen at edge {seen[(a, b)]}")
            bad = True
        else:
            seen[(a, b)] = i
        if not bad:
            edges.append((a, b, table))

    if errors:
        raise ValidationError(errors)
    edges.sort(key=lambda e: (e[0], e[1]))
    return Instance._trusted(n_a, n_b, sigma, tuple(edges))


@dataclass(frozen=True)
class Labeling:
    labels_a: tuple[int, ...]
    labels_b: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels_a", tuple(int(x) for x in self.labels_a))
        object.__setattr__(self, "labels_b", tuple(int(x) for x in self.labels_b))

    def check(self, inst: Instance) -> None:
        errors = []
        if len(self.labels_a) != inst.n_a or len(self.labels_b) != inst.n_b:
            errors.append(
                f"labeling dimensions ({len(self.labels_a)}, {len(self.labels_b)}) "
                f"!= instance ({inst.n_a}, {inst.n_b})"
            )
        for side, labels in (("a", self.labels_a), ("b", self.labels_b)):
            for v, s in enumerate(labels):
                if not 0 <= s < inst.sigma:
                    errors.append(f"label of {side}{v} out of alphabet: {s}")
        if errors:
            raise ValidationError(errors)


@dataclass(frozen=True)
class Multilabeling:
    sets_a: tuple[frozenset[int], ...]
    sets_b: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "sets_a", tuple(frozenset(int(x) for x in s) for s in self.sets_a))
        object.__setattr__(self, "sets_b", tuple(frozenset(int(x) for x in s) for s in self.sets_b))

    @property
    def cost(self) -> int:
        return sum(map(len, self.sets_a)) + sum(map(len, self.sets_b))

    @classmethod
    def empty(cls, inst: Instance) -> "Multilabeling":
        return cls((frozenset(),) * inst.n_a, (frozenset(),) * inst.n_b)

    @classmethod
    def full(cls, inst: Instance) -> "Multilabeling":
        everything = frozenset(range(inst.sigma))
        return cls((everything,) * inst.n_a, (everything,) * inst.n_b)

    def add(self, side: str, v: int, symbol: int) -> "Multilabeling":
        """Copy with ``symbol`` added at vertex ``v`` of ``side``."""
        sets_a, sets_b = list(self.sets_a), list(self.sets_b)
        target = sets_a if side == "a" else sets_b
        target[v] = target[v] | {symbol}
        return Multilabeling(tuple(sets_a), tuple(sets_b))

    def check(self, inst: Instance) -> None:
        errors = []
        if len(self.sets_a) != inst.n_a or len(self.sets_b) != inst.n_b:
            errors.append(
                f"multilabeling dimensions ({len(self.sets_a)}, {len(self.sets_b)}) "
                f"!= instance ({inst.n_a}, {inst.n_b})"
            )
        for side, sets in (("a", self.sets_a), ("b", self.sets_b)):
            for v, s in enumerate(sets):
                if any(not 0 <= x < inst.sigma for x in s):
                    errors.append(f"label set of {side}{v} leaves the alphabet: {sorted(s)}")
        if errors:
            raise ValidationError(errors)


def singleton_lift(phi: Labeling) -> Multilabeling:
    return Multilabeling(
        tuple(frozenset((s,)) for s in phi.labels_a),
        tuple(frozenset((s,)) for s in phi.labels_b),
    )


class EvalReport(NamedTuple):
    satisfied_count: int
    total_edges: int
    value: Fraction
    cost: int | None = None


def _value(satisfied: int, total: int) -> Fraction:
    # vacuous truth on an edgeless instance
    return Fraction(satisfied, total) if total else Fraction(1)


def satisfied_mask(inst: Instance, phi: Labeling) -> np.ndarray:
    """Boolean mask over ``inst.edges`` of the constraints ``phi`` satisfies."""
    if not inst.edges:
        return np.zeros(0, dtype=bool)
    la = np.asarray(phi.labels_a, dtype=np.int64)
    lb = np.asarray(phi.labels_b, dtype=np.int64)
    rows = np.arange(inst.num_edges)
    return inst.tables[rows, la[inst.edge_a]] == lb[inst.edge_b]


def eval_labeling(inst: Instance, phi: Labeling) -> EvalReport:
    phi.check(inst)
    sat = int(np.count_nonzero(satisfied_mask(inst, phi)))
    return EvalReport(sat, inst.num_edges, _value(sat, inst.num_edges))


def edge_satisfied(table: Sequence[int], set_a: frozenset[int], set_b: frozenset[int]) -> bool:
    return any(table[s] in set_b for s in set_a)


def eval_multilabeling(inst: Instance, psi: Multilabeling) -> EvalReport:
    psi.check(inst)
    sat = sum(
        edge_satisfied(table, psi.sets_a[a], psi.sets_b[b]) for a, b, table in inst.edges
    )
    return EvalReport(sat, inst.num_edges, _value(sat, inst.num_edges), psi.cost)


class DegreeProfile(NamedTuple):
    max_deg_a: int
    max_deg_b: int
    min_deg: int
    is_biregular: bool
    histogram: dict[int, int]


def degree_profile(inst: Instance) -> DegreeProfile:
    da, db = inst.deg_a, inst.deg_b
    hist = Counter(int(d) for d in da) + Counter(int(d) for d in db)
    return DegreeProfile(
        max_deg_a=int(da.max()),
        max_deg_b=int(db.max()),
        min_deg=int(min(da.min(), db.min())),
        is_biregular=bool((da == da[0]).all() and (db == db[0]).all()),
        histogram=dict(sorted(hist.items())),
    )


def max_degree(inst: Instance) -> int:
    prof = degree_profile(inst)
    return max(prof.max_deg_a, prof.max_deg_b)
