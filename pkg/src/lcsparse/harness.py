"""Monte Carlo experiments with exact oracles for the reduction's probabilistic steps.

Each ``trial_*`` function is a deterministic fold over trial indices: trial
``i`` draws only from ``derive(seed, TAG_TRIAL, i)``, so results do not depend
on the number of worker processes.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Callable, Iterable, Literal, NamedTuple, Sequence

import numpy as np

from .core import (
    Instance,
    Labeling,
    Multilabeling,
    edge_satisfied,
    eval_labeling,
    eval_multilabeling,
    satisfied_mask,
)
from .generators import GenSpec, corruption_count, gen_planted, gen_random, generate
from .reductions import SparsifyParams, regular_degree, sparsify_with, subsample_mask
from .rng import TAG_SUBSAMPLE, TAG_TRIAL, derive
from .solvers import maxrep_exact, minrep_exact, repair_multilabeling, round_multilabeling

SIGMAS = 3.0
# thresholds like 0.2 * p * D * n are products of decimal constants; values
# within this relative distance of an integer are treated as that integer
_INT_SNAP = 1e-9


def count_floor(x: float) -> int:
    """Largest integer ``k <= x``, robust to rounding noise in ``x``."""
    k = round(x)
    return k if abs(x - k) <= _INT_SNAP * max(1.0, abs(x)) else math.floor(x)


def count_below(x: float) -> int:
    """Largest integer ``k < x``, robust to rounding noise in ``x``."""
    k = round(x)
    return k - 1 if abs(x - k) <= _INT_SNAP * max(1.0, abs(x)) else math.ceil(x) - 1


# -- exact binomial oracles ----------------------------------------------------


def binom_pmf(n: int, k: int, p: float) -> float:
    if not 0 <= k <= n:
        return 0.0
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    log_pmf = (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    return math.exp(log_pmf)


def binom_tail_ge(n: int, p: float, k: int) -> float:
    """Pr[Binomial(n, p) >= k] by direct summation."""
    if k <= 0:
        return 1.0
    return math.fsum(binom_pmf(n, j, p) for j in range(k, n + 1))


def binom_cdf_lt(n: int, p: float, x: float) -> float:
    """Pr[Binomial(n, p) < x] by direct summation."""
    top = count_below(x)
    if top < 0:
        return 0.0
    return math.fsum(binom_pmf(n, j, p) for j in range(0, min(top, n) + 1))


def expected_removed_edges(num_edges: int, D: int, p: float, delta: int) -> float:
    """Exact E|E_interm minus E'| on a D-regular graph.

    Given that edge (a, b) is kept, a is trimmed iff Binomial(D-1, p) >= delta,
    and the events at a and b involve disjoint edges, hence are independent.
    """
    q = binom_tail_ge(D - 1, p, delta)
    return num_edges * p * (2 * q - q * q)


# -- reports -------------------------------------------------------------------


@dataclass
class TrialReport:
    experiment: str
    statistic: str
    trials: int
    success_count: int
    empirical_mean: float
    empirical_variance: float
    threshold: float | None = None
    claim_probability: float | None = None
    claim_direction: Literal["at_least", "at_most"] = "at_least"
    claim_checked: bool = True
    oracle_value: float | None = None
    frequency_oracle: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def frequency(self) -> float:
        return self.success_count / self.trials if self.trials else 0.0

    @property
    def mean_radius(self) -> float:
        return SIGMAS * math.sqrt(self.empirical_variance / self.trials) if self.trials else 0.0

    def _freq_radius(self, q: float) -> float:
        return SIGMAS * math.sqrt(q * (1 - q) / self.trials)

    @property
    def mean_ok(self) -> bool | None:
        if self.oracle_value is None or not self.trials:
            return None
        return abs(self.empirical_mean - self.oracle_value) <= self.mean_radius + 1e-9

    @property
    def frequency_ok(self) -> bool | None:
        if self.frequency_oracle is None or not self.trials:
            return None
        q = self.frequency_oracle
        return abs(self.frequency - q) <= self._freq_radius(q) + 1e-12

    @property
    def claim_ok(self) -> bool | None:
        if self.claim_probability is None or not self.claim_checked or not self.trials:
            return None
        c = self.claim_probability
        slack = self._freq_radius(c)
        if self.claim_direction == "at_least":
            return self.frequency >= c - slack
        return self.frequency <= c + slack + 1e-12

    @property
    def passed(self) -> bool:
        return all(v is not False for v in (self.mean_ok, self.frequency_ok, self.claim_ok))

    def to_record(self) -> dict:
        record = asdict(self)
        record.update(
            frequency=self.frequency,
            mean_radius=self.mean_radius,
            mean_ok=self.mean_ok,
            frequency_ok=self.frequency_ok,
            claim_ok=self.claim_ok,
            passed=self.passed,
        )
        return record


CSV_COLUMNS = [
    "experiment",
    "trials",
    "statistic",
    "mean",
    "variance",
    "threshold",
    "frequency",
    "oracle_value",
    "pass",
]


def write_jsonl(reports: Iterable[TrialReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for report in reports:
            fh.write(json.dumps(report.to_record(), sort_keys=True, default=str) + "\n")


def write_csv(reports: Iterable[TrialReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow(
                [
                    r.experiment,
                    r.trials,
                    r.statistic,
                    repr(r.empirical_mean),
                    repr(r.empirical_variance),
                    "" if r.threshold is None else repr(r.threshold),
                    repr(r.frequency),
                    "" if r.oracle_value is None else repr(r.oracle_value),
                    "true" if r.passed else "false",
                ]
            )


# -- trial execution -----------------------------------------------------------


def trial_seed(seed: int, i: int) -> int:
    return derive(seed, TAG_TRIAL, i)


def _run_one(func: Callable[[int], tuple], seed: int, i: int) -> tuple:
    return func(trial_seed(seed, i))


def run_trials(
    func: Callable[[int], tuple], trials: int, seed: int, workers: int = 1
) -> list[tuple]:
    """Per-trial results in index order; ``func`` must be picklable for ``workers > 1``."""
    job = partial(_run_one, func, seed)
    if workers <= 1:
        return [job(i) for i in range(trials)]
    chunk = max(1, trials // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(trials), chunksize=chunk))


def _mean_var(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return 0.0, 0.0
    var = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), var


def _bind(inst: Instance, params: SparsifyParams) -> SparsifyParams:
    D = regular_degree(inst)
    return params if params.p is not None and params.D == D else params.for_degree(D)


# -- trim ----------------------------------------------------------------------


def _trim_trial(inst: Instance, params: SparsifyParams, s: int) -> tuple[int, int]:
    out = sparsify_with(inst, params, s)
    deg = 0
    if out.trimmed.edges:
        deg = int(max(out.trimmed.deg_a.max(), out.trimmed.deg_b.max()))
    return out.removed_edges, deg


def trial_trim(
    spec: GenSpec, params: SparsifyParams, trials: int, seed: int, workers: int = 1
) -> TrialReport:
    """Removed-edge count of subsample-then-trim against its exact expectation.

    The success event is ``removed <= 0.1 p D n``; its 0.99 claim is only
    tested when Markov's inequality on the per-endpoint slack
    ``1/delta + pD/delta`` guarantees it at these constants.
    """
    inst, _ = generate(spec)
    params = _bind(inst, params)
    p, D, delta, n = params.p, params.D, params.delta, inst.n
    results = run_trials(partial(_trim_trial, inst, params), trials, seed, workers)
    removed = [r[0] for r in results]
    threshold = 0.1 * p * D * n
    slack = 1 / delta + p * D / delta
    markov_failure = 2 * slack * p * inst.num_edges / threshold if threshold > 0 else math.inf
    guard_ok = D >= params.guard_ratio * delta and markov_failure <= 1 - 0.99
    mean, var = _mean_var(removed)
    return TrialReport(
        experiment="trim",
        statistic="removed_edges",
        trials=trials,
        success_count=sum(r <= count_floor(threshold) for r in removed),
        empirical_mean=mean,
        empirical_variance=var,
        threshold=threshold,
        claim_probability=0.99,
        claim_checked=guard_ok,
        oracle_value=expected_removed_edges(inst.num_edges, D, p, delta),
        extras={
            "n": n,
            "D": D,
            "delta": delta,
            "p": p,
            "num_edges": inst.num_edges,
            "trim_slack": slack,
            "markov_failure_bound": markov_failure,
            "guard_ok": guard_ok,
            "threshold_delta_reading": 0.1 * p * delta * n,
            "frequency_delta_reading": sum(
                r <= count_floor(0.1 * p * delta * n) for r in removed
            )
            / trials,
            "max_trimmed_degree": max((r[1] for r in results), default=0),
        },
    )


# -- completeness ----------------------------------------------------------------


def _restrict_to_support(inst: Instance, psi: Multilabeling) -> Multilabeling:
    """Drop labels on vertices that no edge of ``inst`` touches."""
    return Multilabeling(
        tuple(s if d else frozenset() for s, d in zip(psi.sets_a, inst.deg_a)),
        tuple(s if d else frozenset() for s, d in zip(psi.sets_b, inst.deg_b)),
    )


def _completeness_trial(
    inst: Instance, phi: Labeling, unsat: np.ndarray, params: SparsifyParams, s: int
) -> tuple[int, int, int, bool]:
    out = sparsify_with(inst, params, s)
    in_interm = int(np.count_nonzero(unsat & out.kept_mask))
    in_final = int(np.count_nonzero(unsat & out.final_mask))
    psi = _restrict_to_support(out.trimmed, repair_multilabeling(out.trimmed, phi))
    value_one = eval_multilabeling(out.trimmed, psi).value == 1
    return in_interm, in_final, psi.cost, value_one


def trial_completeness(
    spec: GenSpec, params: SparsifyParams, trials: int, seed: int, workers: int = 1
) -> TrialReport:
    """Repair cost on the sparsified instance of an eps-corrupted planted instance.

    Tracks ``|E_unsat ∩ E_interm|`` against its exact mean ``p * |E_unsat|``;
    the success event is ``cost <= (1 + eps * delta) N``.
    """
    inst, phi = generate(spec)
    if phi is None:
        raise ValueError("completeness trials need a planted or corrupted spec")
    params = _bind(inst, params)
    p, delta, N = params.p, params.delta, inst.N
    unsat = ~satisfied_mask(inst, phi)
    k = int(np.count_nonzero(unsat))
    eps = spec.eps if spec.kind == "corrupted" else 0.0
    if spec.kind == "corrupted" and k != corruption_count(eps, inst.num_edges):
        raise AssertionError("corrupted instance has the wrong number of unsatisfied edges")

    results = run_trials(
        partial(_completeness_trial, inst, phi, unsat, params), trials, seed, workers
    )
    x = [r[0] for r in results]
    costs = [r[2] for r in results]
    cost_bound = (1 + eps * delta) * N
    markov_threshold = 0.5 * eps * delta * N
    markov_failure = p * k / markov_threshold if markov_threshold > 0 else 0.0
    mean, var = _mean_var(x)
    return TrialReport(
        experiment="completeness",
        statistic="unsat_in_intermediate",
        trials=trials,
        success_count=sum(c <= cost_bound for c in costs),
        empirical_mean=mean,
        empirical_variance=var,
        threshold=markov_threshold,
        claim_probability=0.9,
        claim_checked=markov_failure <= 1 - 0.9,
        oracle_value=p * k,
        extras={
            "eps": eps,
            "unsat_edges": k,
            "N": N,
            "delta": delta,
            "p": p,
            "cost_bound": cost_bound,
            "markov_failure_bound": markov_failure,
            "markov_event_frequency": sum(v <= count_floor(markov_threshold) for v in x) / trials,
            "max_cost": max(costs, default=0),
            "mean_cost": _mean_var(costs)[0],
            "repair_bound_violations": sum(r[2] > N + 2 * r[1] for r in results),
            "cost_above_N": sum(c > N for c in costs),
            "value_one_failures": sum(not r[3] for r in results),
        },
    )


# -- soundness trend ---------------------------------------------------------------


def _soundness_trial(
    n: int, deg: int, sigma: int, params: SparsifyParams, budget: int, s: int
) -> tuple:
    random_inst = gen_random(GenSpec(n, deg, sigma, "random", seed=s))
    planted_inst, _ = gen_planted(GenSpec(n, deg, sigma, "planted", seed=s))
    val = maxrep_exact(random_inst).objective
    sparsify_seed = derive(s, TAG_SUBSAMPLE)
    sparse_r = sparsify_with(random_inst, params, sparsify_seed).trimmed
    sparse_p = sparsify_with(planted_inst, params, sparsify_seed).trimmed
    opt_r = minrep_exact(sparse_r, budget)
    opt_p = minrep_exact(sparse_p, budget)
    if not (opt_r.proved_optimal and opt_p.proved_optimal):
        return (None, str(val), None, None)
    return (opt_r.objective >= opt_p.objective, str(val), opt_r.objective, opt_p.objective)


def trial_soundness_small(
    spec: GenSpec,
    params: SparsifyParams,
    trials: int,
    seed: int,
    budget: int = 200_000,
    workers: int = 1,
) -> TrialReport:
    """Paired random-vs-planted Min-Rep after sparsification on the same graph.

    Both arms of a pair share the constraint graph and the subsampling draws,
    so they differ only in their tables. Success: ``minrep(random') >=
    minrep(planted')``. Pairs where either exact solve runs out of budget are
    discarded and counted.
    """
    params = params if params.p is not None else params.for_degree(spec.deg)
    results = run_trials(
        partial(_soundness_trial, spec.n, spec.deg, spec.sigma, params, budget),
        trials,
        seed,
        workers,
    )
    done = [r for r in results if r[0] is not None]
    N = 2 * spec.n
    ratios = [r[2] / N for r in done]
    mean, var = _mean_var(ratios)
    return TrialReport(
        experiment="soundness",
        statistic="minrep_random_over_N",
        trials=len(done),
        success_count=sum(bool(r[0]) for r in done),
        empirical_mean=mean,
        empirical_variance=var,
        threshold=0.06 * N / math.sqrt(params.gamma),
        claim_probability=0.9,
        extras={
            "discarded": len(results) - len(done),
            "mean_planted_over_N": _mean_var([r[3] / N for r in done])[0],
            "joint_val_minrep_ratio": [(r[1], r[2] / N) for r in done],
            "delta": params.delta,
            "p": params.p,
        },
    )


# -- Chernoff tail ------------------------------------------------------------------


def _unsat_tail_trial(unsat: np.ndarray, p: float, s: int) -> tuple[int]:
    kept = subsample_mask(unsat.size, p, s)
    return (int(np.count_nonzero(unsat & kept)),)


def unsat_mask(inst: Instance, psi: Multilabeling) -> np.ndarray:
    return np.array(
        [not edge_satisfied(t, psi.sets_a[a], psi.sets_b[b]) for a, b, t in inst.edges],
        dtype=bool,
    )


def chernoff_bound(p: float, Dn: int) -> float:
    """``exp(-(0.6)^2 * 0.5 p D n)``, the claimed bound on the lower tail."""
    return math.exp(-0.36 * 0.5 * p * Dn)


def trial_unsat_tail(
    inst: Instance, psi: Multilabeling, p: float, trials: int, seed: int, workers: int = 1
) -> TrialReport:
    """How often fewer than ``0.2 p D n`` of ``psi``'s violated edges survive subsampling.

    The success event here is the bad event; its exact probability is the
    Binomial(|E_unsat|, p) left tail, and the exponential Chernoff bound is checked
    as an upper bound on it.
    """
    report = eval_multilabeling(inst, psi)
    if report.value >= Fraction(1, 2):
        raise ValueError(f"psi has value {report.value} >= 1/2")
    unsat = unsat_mask(inst, psi)
    k = int(np.count_nonzero(unsat))
    Dn = inst.num_edges
    threshold = 0.2 * p * Dn
    results = run_trials(partial(_unsat_tail_trial, unsat, p), trials, seed, workers)
    x = [r[0] for r in results]
    mean, var = _mean_var(x)
    tail = binom_cdf_lt(k, p, threshold)
    bound = chernoff_bound(p, Dn)
    return TrialReport(
        experiment="unsat_tail",
        statistic="unsat_in_intermediate",
        trials=trials,
        success_count=sum(v <= count_below(threshold) for v in x),
        empirical_mean=mean,
        empirical_variance=var,
        threshold=threshold,
        claim_probability=bound,
        claim_direction="at_most",
        oracle_value=p * k,
        frequency_oracle=tail,
        extras={
            "unsat_edges": k,
            "Dn": Dn,
            "p": p,
            "exact_tail": tail,
            "chernoff_bound": bound,
            "chernoff_dominates": tail <= bound,
        },
    )


# -- counting bound -------------------------------------------------------------------


class CountingRecord(NamedTuple):
    N: int
    sigma: int
    gamma: float
    t: int
    log_binom: float
    log_bound: float
    holds: bool


def counting_bound(n_total: int, sigma: int, gamma: float) -> CountingRecord:
    """Compare ``ln C(N sigma, floor(0.06 N / sqrt(gamma)))`` with ``(0.5 N / sqrt(gamma)) ln(2 sigma)``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if sigma <= 1 / gamma:
        raise ValueError(f"need sigma > 1/gamma, got sigma={sigma}, 1/gamma={1 / gamma:g}")
    scale = n_total / math.sqrt(gamma)
    t = math.floor(0.06 * scale * (1 + 1e-12))
    M = n_total * sigma
    log_binom = math.lgamma(M + 1) - math.lgamma(t + 1) - math.lgamma(M - t + 1)
    log_bound = 0.5 * scale * math.log(2 * sigma)
    return CountingRecord(n_total, sigma, gamma, t, log_binom, log_bound, log_binom <= log_bound)


def counting_grid(
    Ns: Iterable[int] = range(10, 201, 10),
    sigmas: Iterable[int] = range(2, 65, 2),
    gammas_per_sigma: int = 8,
) -> list[CountingRecord]:
    """Counting bound on a grid; gamma spans ``(1/sigma, 0.5]`` for each sigma."""
    records = []
    for sigma in sigmas:
        low = 1 / sigma
        if low >= 0.5:
            continue
        gammas = [low + (0.5 - low) * (j + 1) / gammas_per_sigma for j in range(gammas_per_sigma)]
        for N in Ns:
            for gamma in gammas:
                records.append(counting_bound(N, sigma, gamma))
    return records


def counting_report(records: Sequence[CountingRecord]) -> TrialReport:
    holds = [r.holds for r in records]
    margins = [r.log_bound - r.log_binom for r in records]
    mean, var = _mean_var(margins)
    return TrialReport(
        experiment="counting",
        statistic="log_bound_minus_log_binom",
        trials=len(records),
        success_count=sum(holds),
        empirical_mean=mean,
        empirical_variance=var,
        threshold=0.0,
        claim_probability=1.0,
        extras={"min_margin": min(margins, default=0.0), "violations": len(records) - sum(holds)},
    )


# -- rounding ----------------------------------------------------------------------------


def rounding_expectation(inst: Instance, psi: Multilabeling) -> Fraction:
    """Exact expected value of :func:`round_multilabeling` applied to ``psi``."""
    psi.check(inst)
    if not inst.edges:
        return Fraction(1)
    total = Fraction(0)
    for a, b, table in inst.edges:
        sa = psi.sets_a[a] or frozenset((0,))
        sb = psi.sets_b[b] or frozenset((0,))
        hits = sum(table[s] in sb for s in sa)
        total += Fraction(hits, len(sa) * len(sb))
    return total / inst.num_edges


def _rounding_trial(inst: Instance, psi: Multilabeling, s: int) -> tuple[float]:
    return (float(eval_labeling(inst, round_multilabeling(inst, psi, s)).value),)


def trial_rounding(
    inst: Instance, psi: Multilabeling, trials: int, seed: int, workers: int = 1
) -> TrialReport:
    results = run_trials(partial(_rounding_trial, inst, psi), trials, seed, workers)
    mean, var = _mean_var([r[0] for r in results])
    psi_value = eval_multilabeling(inst, psi).value
    return TrialReport(
        experiment="rounding",
        statistic="rounded_value",
        trials=trials,
        success_count=trials,
        empirical_mean=mean,
        empirical_variance=var,
        oracle_value=float(rounding_expectation(inst, psi)),
        extras={"psi_value": str(psi_value), "psi_cost": psi.cost},
    )
