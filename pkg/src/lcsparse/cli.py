"""Command-line interface: ``lcsparse {gen,eval,sparsify,solve,trial,params}``.

Exit status: 0 on success, 1 on invalid input data or I/O failure, 2 on
usage errors. Every randomized subcommand requires ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .core import (
    ValidationError,
    eval_labeling,
    eval_multilabeling,
    max_degree,
    singleton_lift,
)
from .formats import (
    parse_instance,
    parse_labeling,
    parse_multilabeling,
    serialize_instance,
    serialize_labeling,
    serialize_multilabeling,
)
from .generators import GenSpec, gen_random, generate
from .harness import (
    TrialReport,
    counting_bound,
    counting_grid,
    counting_report,
    trial_completeness,
    trial_soundness_small,
    trial_trim,
    trial_unsat_tail,
    write_csv,
    write_jsonl,
)
from .reductions import C_DELTA, C_P, GUARD_RATIO, compute_params, instantiate_gap_params, sparsify
from .solvers import (
    MAXREP_BUDGET,
    MINREP_BUDGET,
    maxrep_exact,
    minrep_exact,
    random_labeling,
    trivial_minrep,
)


class CliError(Exception):
    """Input or I/O problem reported with exit status 1."""


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _load_instance(path: str):
    return parse_instance(_read(path))


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> None:
    spec = GenSpec(args.n, args.deg, args.sigma, args.kind, args.eps, args.seed)
    inst, phi = generate(spec)
    _write(args.output, serialize_instance(inst))
    if args.labeling_out:
        if phi is None:
            raise CliError("random instances have no planted labeling")
        _write(args.labeling_out, serialize_labeling(phi))


def cmd_eval(args) -> None:
    inst = _load_instance(args.instance)
    if args.labeling:
        report = eval_labeling(inst, parse_labeling(_read(args.labeling), inst))
    else:
        report = eval_multilabeling(inst, parse_multilabeling(_read(args.multilabeling), inst))
    print(f"satisfied {report.satisfied_count}")
    print(f"edges {report.total_edges}")
    print(f"value {report.value}")
    if report.cost is not None:
        print(f"cost {report.cost}")


def _report_bytes(summary: dict, path: str, inst_texts: dict[str, bytes]) -> bytes:
    if path.endswith(".csv"):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(summary))
        writer.writerow([repr(v) if isinstance(v, float) else v for v in summary.values()])
        return buf.getvalue().encode("utf-8")
    record = dict(summary)
    record.update({k: v.decode("utf-8") for k, v in inst_texts.items()})
    return (json.dumps(record, sort_keys=True) + "\n").encode("utf-8")


def cmd_sparsify(args) -> None:
    inst = _load_instance(args.instance)
    out = sparsify(
        inst,
        args.gamma,
        args.seed,
        c_delta=args.c_delta,
        c_p=args.c_p,
        guard_ratio=args.guard_ratio,
        delta=args.delta,
    )
    trimmed = serialize_instance(out.trimmed)
    _write(args.output, trimmed)
    summary = out.summary()
    summary["seed"] = args.seed
    summary["max_degree"] = max_degree(out.trimmed) if out.trimmed.edges else 0
    if args.intermediate_out:
        _write(args.intermediate_out, serialize_instance(out.intermediate))
    _write(
        args.report,
        _report_bytes(
            summary,
            args.report,
            {"intermediate": serialize_instance(out.intermediate), "trimmed": trimmed},
        ),
    )
    for key, value in summary.items():
        print(f"{key} {value}")


def cmd_solve(args, parser) -> None:
    inst = _load_instance(args.instance)
    method = args.method or "exact"
    if args.objective == "maxrep":
        if method == "trivial":
            parser.error("--trivial applies to --objective minrep")
        if method == "random":
            if args.seed is None:
                parser.error("--random requires --seed")
            phi = random_labeling(inst, args.seed)
            print(f"value {eval_labeling(inst, phi).value}")
        else:
            result = maxrep_exact(inst, args.budget or MAXREP_BUDGET)
            phi = result.witness
            print(f"value {result.objective}")
            print(f"optimal {str(result.proved_optimal).lower()}")
        sys.stdout.write(serialize_labeling(phi).decode("utf-8"))
        return
    if method == "random":
        parser.error("--random applies to --objective maxrep")
    if method == "trivial":
        psi = trivial_minrep(inst)
        print(f"cost {psi.cost}")
    else:
        result = minrep_exact(inst, args.budget or MINREP_BUDGET)
        psi = result.witness
        print(f"cost {result.objective}")
        print(f"optimal {str(result.proved_optimal).lower()}")
    sys.stdout.write(serialize_multilabeling(psi).decode("utf-8"))


def _parse_spec(pairs: Sequence[str], parser) -> dict[str, str]:
    spec = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            parser.error(f"--spec entries look like key=value, got {pair!r}")
        spec[key.replace("-", "_")] = value
    return spec


def _sparsify_params(spec: dict[str, str], sigma: int, D: int):
    gamma = float(spec.get("gamma", 0.25))
    c_delta = float(spec.get("c_delta", C_DELTA))
    delta = int(spec["delta"]) if "delta" in spec else None
    params = compute_params(
        sigma,
        gamma,
        c_delta=c_delta,
        guard_ratio=float(spec.get("guard_ratio", GUARD_RATIO)),
        delta=delta,
    )
    if "p" in spec:
        c_p = float(spec["p"]) * D / params.delta
    else:
        c_p = float(spec.get("c_p", C_P))
    return replace(params, c_p=c_p).for_degree(D)


KNOWN_SPEC_KEYS = {
    "trim": {"n", "deg", "sigma", "instance_seed", "delta", "p", "c_p", "c_delta", "gamma", "guard_ratio"},
    "completeness": {"n", "deg", "sigma", "eps", "instance_seed", "delta", "p", "c_p", "c_delta", "gamma", "guard_ratio"},
    "soundness": {"n", "deg", "sigma", "delta", "p", "c_p", "c_delta", "gamma", "guard_ratio", "budget"},
    "unsat-tail": {"n", "deg", "sigma", "p", "instance_seed"},
    "counting": {"N", "sigma", "gamma"},
}


def cmd_trial(args, parser) -> None:
    spec = _parse_spec(args.spec, parser)
    unknown = set(spec) - KNOWN_SPEC_KEYS[args.experiment]
    if unknown:
        parser.error(f"unknown --spec keys for {args.experiment}: {', '.join(sorted(unknown))}")
    try:
        reports = _run_experiment(args, spec)
    except KeyError as exc:
        parser.error(f"--spec is missing {exc.args[0]!r} for {args.experiment}")
    if args.report.endswith(".csv"):
        write_csv(reports, args.report)
    else:
        write_jsonl(reports, args.report)
    if args.csv:
        write_csv(reports, args.csv)
    for r in reports:
        print(
            f"{r.experiment} trials={r.trials} mean={r.empirical_mean!r} "
            f"frequency={r.frequency!r} oracle={r.oracle_value!r} pass={str(r.passed).lower()}"
        )


def _run_experiment(args, spec: dict[str, str]) -> list[TrialReport]:
    exp = args.experiment
    instance_seed = int(spec.get("instance_seed", args.seed))
    if exp == "counting":
        if "N" in spec:
            rec = counting_bound(int(spec["N"]), int(spec["sigma"]), float(spec["gamma"]))
            return [counting_report([rec])]
        return [counting_report(counting_grid())]
    n, deg, sigma = int(spec["n"]), int(spec["deg"]), int(spec.get("sigma", 2))
    if exp == "unsat-tail":
        inst = gen_random(GenSpec(n, deg, sigma, "random", seed=instance_seed))
        psi = singleton_lift(random_labeling(inst, instance_seed))
        return [trial_unsat_tail(inst, psi, float(spec["p"]), args.trials, args.seed, args.workers)]
    params = _sparsify_params(spec, sigma, deg)
    if exp == "trim":
        gen = GenSpec(n, deg, sigma, "planted", seed=instance_seed)
        return [trial_trim(gen, params, args.trials, args.seed, args.workers)]
    if exp == "completeness":
        eps = float(spec.get("eps", 0.0))
        kind = "corrupted" if eps > 0 else "planted"
        gen = GenSpec(n, deg, sigma, kind, eps, instance_seed)
        return [trial_completeness(gen, params, args.trials, args.seed, args.workers)]
    gen = GenSpec(n, deg, sigma, "random", seed=instance_seed)
    budget = int(spec.get("budget", 200_000))
    return [trial_soundness_small(gen, params, args.trials, args.seed, budget, args.workers)]


def cmd_params(args, parser) -> None:
    if args.gap is not None:
        if args.big_c is None:
            parser.error("--gap needs --big-c")
        gp = instantiate_gap_params(args.gap, args.big_c)
        for key in ("g", "big_c", "q", "gamma", "delta", "eps", "chan_delta"):
            print(f"{key} {getattr(gp, key)!r}")
        print(f"alphabet_size {gp.alphabet_size}")
        return
    if args.sigma is None or args.gamma is None:
        parser.error("params needs --gap/--big-c or --sigma/--gamma")
    params = compute_params(args.sigma, args.gamma, c_delta=args.c_delta, c_p=args.c_p)
    print(f"delta {params.delta}")
    print(f"gamma {params.gamma!r}")
    print(f"c_delta {params.c_delta!r}")
    print(f"c_p {params.c_p!r}")
    print(f"trim_slack {params.trim_slack!r}")


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcsparse", description="Label Cover degree sparsification toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a regular instance")
    p.add_argument("--kind", choices=["planted", "corrupted", "random"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--labeling-out")

    p = sub.add_parser("eval", help="evaluate a labeling or multilabeling")
    p.add_argument("instance")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--labeling")
    g.add_argument("--multilabeling")

    p = sub.add_parser("sparsify", help="subsample and trim a regular instance")
    p.add_argument("instance")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--c-delta", type=float, default=C_DELTA)
    p.add_argument("--c-p", type=float, default=C_P)
    p.add_argument("--guard-ratio", type=float, default=GUARD_RATIO)
    p.add_argument("--delta", type=int)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--intermediate-out")

    p = sub.add_parser("solve", help="solve Max-Rep or Min-Rep")
    p.add_argument("instance")
    p.add_argument("--objective", choices=["maxrep", "minrep"], required=True)
    m = p.add_mutually_exclusive_group()
    m.add_argument("--exact", dest="method", action="store_const", const="exact")
    m.add_argument("--trivial", dest="method", action="store_const", const="trivial")
    m.add_argument("--random", dest="method", action="store_const", const="random")
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("trial", help="run a Monte Carlo experiment")
    p.add_argument(
        "--experiment",
        choices=["trim", "completeness", "soundness", "unsat-tail", "counting"],
        required=True,
    )
    p.add_argument("--spec", nargs="*", default=[], metavar="KEY=VALUE")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--csv")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("params", help="derive reduction parameters")
    p.add_argument("--gap", type=int)
    p.add_argument("--big-c", type=float)
    p.add_argument("--sigma", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--c-delta", type=float, default=C_DELTA)
    p.add_argument("--c-p", type=float, default=C_P)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        if args.command == "gen":
            cmd_gen(args)
        elif args.command == "eval":
            cmd_eval(args)
        elif args.command == "sparsify":
            cmd_sparsify(args)
        elif args.command == "solve":
            cmd_solve(args, sub)
        elif args.command == "trial":
            cmd_trial(args, sub)
        else:
            cmd_params(args, sub)
    except ValidationError as exc:
        for err in exc.errors:
            print(f"invalid input: {err}", file=sys.stderr)
        return 1
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
