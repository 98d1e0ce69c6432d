"""Command line entry point.

Subcommands:
  check      envy-freeability, fairness predicates and minimum subsidies
  solve      run an allocator and write the resulting outcome
  mechanism  VCG with up-front subsidy, or biased adjusted winner
  mef        split a money budget over a given allocation
  fixtures   re-verify the built-in worked examples and bound fixtures

All output is deterministic; rationals print as "p/q".  Exit codes:
0 success / positive verdict, 1 negative verdict, 2 input error,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import allocators, criteria, envy, mechanisms, mef, oracle
from .errors import (
    FairSubsidyError,
    FixtureMismatch,
    InternalInconsistency,
    InternalPathError,
    NotEnvyFreeable,
)
from .model import (
    Instance,
    Outcome,
    ZERO,
    allocation_to_dict,
    outcome_to_dict,
    parse_allocation,
    parse_instance,
    parse_outcome,
)
from .rationals import format_rational, loads_exact, parse_rational

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _read_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _read_allocation(instance: Instance, path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_allocation(instance, loads_exact(fh.read()))


def _emit(data: dict, as_json: bool, lines):
    """Either dump the structured payload or the human-readable lines."""
    if as_json:
        print(json.dumps(data, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _fmt_seq(values) -> str:
    return "[" + ", ".join(format_rational(v) for v in values) + "]"


def _tristate(value) -> str:
    if value is None:
        return "skipped (too large)"
    return "yes" if value else "no"


def cmd_check(args) -> int:
    instance = _read_instance(args.instance)
    allocation = _read_allocation(instance, args.allocation)
    freeable = envy.is_weighted_envy_freeable(instance, allocation)
    report = criteria.evaluate_report(instance, allocation)

    data = {
        "envy_freeable": freeable,
        "wef1": report.wef1,
        "wwef1": report.wwef1,
        "wef1_t": report.wef1_t,
        "non_wasteful": report.non_wasteful,
        "pareto_efficient": report.pareto_efficient,
        "nonzero_social_welfare": report.nonzero_social_welfare,
        "weighted_welfare_maximizing": report.weighted_welfare_maximizing,
    }
    lines = [
        f"envy-freeable: {'yes' if freeable else 'no'}",
        f"WEF1: {'yes' if report.wef1 else 'no'}",
        f"WWEF1: {'yes' if report.wwef1 else 'no'}",
        f"WEF1-T: {'yes' if report.wef1_t else 'no'}",
        f"non-wasteful: {'yes' if report.non_wasteful else 'no'}",
        f"Pareto efficient: {_tristate(report.pareto_efficient)}",
        f"non-zero social welfare: {_tristate(report.nonzero_social_welfare)}",
        f"weighted welfare maximizing: {_tristate(report.weighted_welfare_maximizing)}",
    ]
    if freeable:
        subsidy = envy.min_subsidies(instance, allocation)
        data["min_subsidies"] = [format_rational(p) for p in subsidy.payments]
        data["total_subsidy"] = format_rational(sum(subsidy.payments, ZERO))
        lines.append(f"minimum subsidies: {_fmt_seq(subsidy.payments)}")
        lines.append(f"total subsidy: {format_rational(sum(subsidy.payments, ZERO))}")
    else:
        _, cycle = envy.has_positive_cycle(envy.build_envy_graph(instance, allocation))
        data["positive_cycle"] = list(cycle)
        lines.append(f"positive envy cycle through agents: {list(cycle)}")
    if args.emit_graph:
        graph = envy.build_envy_graph(instance, allocation)
        data["envy_graph"] = [[format_rational(x) for x in row] for row in graph.lengths]
        lines.append("envy graph rows (l(i,j) = v_i(X_j)/w_j - v_i(X_i)/w_i):")
        for i, row in enumerate(graph.lengths):
            lines.append(f"  agent {i}: {_fmt_seq(row)}")
    _emit(data, args.format == "json", lines)
    return EXIT_OK if freeable else EXIT_NEGATIVE


ALGORITHMS = ("auto", "all-to-max", "greedy", "alg1", "alg2", "alg3", "sw-max")


def _run_algorithm(instance: Instance, name: str):
    if name == "auto":
        return allocators.auto_allocate(instance)
    if name == "all-to-max":
        return name, allocators.allocate_all_to_max(instance)
    if name == "greedy":
        return name, allocators.greedy_additive_welfare_max(instance)
    if name == "alg1":
        return name, allocators.alg1_identical_additive(instance)
    if name == "alg2":
        return name, allocators.alg2_binary_additive(instance)
    if name == "alg3":
        return name, allocators.alg3_identical_items(instance)
    return name, allocators.brute_force_unweighted_sw_max(instance)


def cmd_solve(args) -> int:
    instance = _read_instance(args.instance)
    name, result = _run_algorithm(instance, args.algorithm)
    outcome = Outcome(result.allocation, result.subsidy.payments)
    data = outcome_to_dict(instance, outcome)
    data["algorithm"] = name
    if result.guarantee is not None:
        data["guarantee"] = format_rational(result.guarantee)
    data["max_subsidy"] = format_rational(result.max_subsidy)
    lines = [f"algorithm: {name}"]
    for i, bundle in enumerate(result.allocation.bundles):
        lines.append(f"agent {instance.agent_ids[i]}: {sorted(bundle)}")
    lines.append(f"minimum subsidies: {_fmt_seq(result.subsidy.payments)}")
    if result.guarantee is not None:
        lines.append(f"per-agent guarantee: {format_rational(result.guarantee)}")
    lines.append(f"achieved max subsidy: {format_rational(result.max_subsidy)}")
    if args.trace:
        data["trace"] = list(result.trace)
        lines.append("trace:")
        lines.extend(f"  {step}" for step in result.trace)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(outcome_to_dict(instance, outcome), fh, sort_keys=True, indent=2)
            fh.write("\n")
        lines.append(f"outcome written to {args.output}")
    _emit(data, args.format == "json", lines)
    return EXIT_OK


def cmd_mechanism(args) -> int:
    instance = _read_instance(args.instance)
    if args.mechanism == "vcg":
        upfront = parse_rational(args.upfront) if args.upfront is not None else None
        result = mechanisms.vcg_with_upfront_subsidy(instance, upfront)
        outcome = result.outcome()
        data = outcome_to_dict(instance, outcome)
        data["mechanism"] = "vcg"
        data["upfront_constant"] = format_rational(result.upfront_constant)
        data["vcg_payments"] = [format_rational(q) for q in result.vcg_payments]
        lines = ["mechanism: vcg",
                 f"upfront constant: {format_rational(result.upfront_constant)}"]
        for i, bundle in enumerate(result.allocation.bundles):
            lines.append(f"agent {instance.agent_ids[i]}: {sorted(bundle)}")
        lines.append(f"vcg payments: {_fmt_seq(result.vcg_payments)}")
        lines.append(f"net subsidies: {_fmt_seq(result.net_payments)}")
    else:
        result = mechanisms.biased_weighted_adjusted_winner(instance)
        outcome = Outcome(result.allocation, (ZERO,) * instance.n)
        data = outcome_to_dict(instance, outcome)
        data["mechanism"] = "aw"
        data["boundary_index"] = result.boundary_index
        data["contested_item"] = result.contested_item
        data["fraction_to_agent1"] = format_rational(result.fraction_to_agent1)
        data["sorted_items"] = list(result.sorted_items)
        lines = ["mechanism: aw"]
        for i, bundle in enumerate(result.allocation.bundles):
            lines.append(f"agent {instance.agent_ids[i]}: {sorted(bundle)}")
        lines.append(f"ratio order: {list(result.sorted_items)}")
        lines.append(f"boundary index: {result.boundary_index}")
        if result.contested_item is not None:
            lines.append(
                f"contested item {result.contested_item} (fractional share"
                f" {format_rational(result.fraction_to_agent1)} to agent 1)"
            )
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(outcome_to_dict(instance, outcome), fh, sort_keys=True, indent=2)
            fh.write("\n")
        lines.append(f"outcome written to {args.output}")
    _emit(data, args.format == "json", lines)
    return EXIT_OK


def cmd_mef(args) -> int:
    instance = _read_instance(args.instance)
    allocation = _read_allocation(instance, args.allocation)
    budget = parse_rational(args.budget)
    result = mef.allocate_budget_mef(instance, allocation, budget)
    outcome = result.outcome(allocation)
    verdict, _ = mef.is_mef(instance, outcome)
    if not verdict:
        raise InternalInconsistency("budget split is not monetarily envy-free")
    data = outcome_to_dict(instance, outcome)
    data["regime"] = result.regime
    data["budget"] = format_rational(budget)
    data["water_level"] = format_rational(result.water_level)
    lines = [
        f"regime: {result.regime}",
        f"payments: {_fmt_seq(result.payments)}",
    ]
    if result.regime == "deficit":
        lines.append(f"water level: {format_rational(result.water_level)}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(outcome_to_dict(instance, outcome), fh, sort_keys=True, indent=2)
            fh.write("\n")
        lines.append(f"outcome written to {args.output}")
    _emit(data, args.format == "json", lines)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    names = sorted(oracle.FIXTURES) if args.all else [args.name]
    failed = False
    for name in names:
        try:
            report = oracle.verify_fixture(name)
        except KeyError as exc:
            print(exc.args[0], file=sys.stderr)
            return EXIT_INPUT
        except FixtureMismatch as exc:
            failed = True
            print(f"FAIL {name}: {exc}")
            continue
        status = "ok" if report.passed else "FAIL"
        print(f"{status} {name}: {len(report.checks)} checks ({report.description})")
        if args.verbose:
            for label, ok, detail in report.checks:
                print(f"    {'ok' if ok else 'FAIL'} {label}: {detail}")
        failed = failed or not report.passed
    return EXIT_NEGATIVE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsubsidy",
        description="Fair division of indivisible items with money under"
        " weighted entitlements (exact rational arithmetic).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="analyse one allocation")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--emit-graph", action="store_true",
                   help="print the weighted envy-graph edge lengths")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="run an allocation algorithm")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p.add_argument("--trace", action="store_true", help="print per-item decisions")
    p.add_argument("--output", help="write the outcome to this JSON file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mechanism", help="run an outcome-producing mechanism")
    p.add_argument("mechanism", choices=("vcg", "aw"))
    p.add_argument("instance")
    p.add_argument("--upfront", help="per-weight up-front constant for vcg (rational)")
    p.add_argument("--output", help="write the outcome to this JSON file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_mechanism)

    p = sub.add_parser("mef", help="split a budget over a given allocation")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--budget", required=True, help="total money available (rational)")
    p.add_argument("--output", help="write the outcome to this JSON file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_mef)

    p = sub.add_parser("fixtures", help="re-verify the built-in fixtures")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--name", help="one fixture name")
    group.add_argument("--all", action="store_true")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotEnvyFreeable as exc:
        print(f"not envy-freeable: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (InternalInconsistency, InternalPathError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except FairSubsidyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
