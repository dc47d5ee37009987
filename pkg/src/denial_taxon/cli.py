"""Command-line entry point.

Exit codes: 0 success, 1 input/validation failure, 2 bad flags or thresholds.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import selfcheck
from .features import ThresholdError, Thresholds, WindowingError, evaluate_stream
from .ingest import Infra, IngestError, ParseStats, load_target_profiles, read_flows
from .lattice import NotComparableError, UnknownNodeError, build_lattice, nearest_classes
from .report import build_report, describe_class, target_summary
from .scenarios import ScenarioError, custom, preset, write_scenario
from .taxonomy import OutcomeKind, VectorParseError, classify, is_consistent, vector_from_names

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
CONFIG_ENV = "DENIAL_TAXON_CONFIG"

log = logging.getLogger("denial_taxon")


def _fail(code: int, message: str) -> int:
    print(f"denial-taxon: error: {message}", file=sys.stderr)
    return code


def resolve_thresholds(args) -> Thresholds:
    """Config file (flag, else environment) overridden by individual flags."""
    path = args.config or os.environ.get(CONFIG_ENV)
    base = Thresholds.from_file(path) if path else Thresholds()
    overrides = {}
    if args.window_secs is not None:
        overrides["window_secs"] = args.window_secs
    if args.packet_limit is not None:
        overrides["low_rate_packet_limit"] = args.packet_limit
    if args.fraction is not None:
        overrides["low_rate_fraction"] = args.fraction
    if args.baseline_windows is not None:
        overrides["baseline_trailing_windows"] = args.baseline_windows
    return Thresholds.from_mapping(overrides, base)


def cmd_classify(args) -> int:
    try:
        thresholds = resolve_thresholds(args)
    except ThresholdError as exc:
        return _fail(EXIT_USAGE, f"invalid threshold: {exc}")
    stats = ParseStats()
    try:
        profiles = load_target_profiles(args.targets)
        records = read_flows(args.input, strict=args.strict, stats=stats)
        reports = [build_report(ew) for ew in evaluate_stream(records, profiles, thresholds)]
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot read input: {exc}")
    except (IngestError, WindowingError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    if stats.skipped:
        log.warning("skipped %d invalid record(s)", stats.skipped)

    out = sys.stdout
    if args.format == "json":
        for r in reports:
            out.write(r.to_json() + "\n")
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
        out.write("summary:\n")
        for line in target_summary(reports):
            out.write(f"  {line}\n")
    return EXIT_OK


def cmd_lattice(args) -> int:
    lat = build_lattice()
    try:
        if args.op == "export":
            print(lat.to_dot() if args.format == "dot" else lat.edge_list())
        elif args.op == "leq":
            print("true" if lat.leq(args.a, args.b) else "false")
        elif args.op == "meet":
            print(lat.node(lat.meet(args.a, args.b)).label)
        elif args.op == "join":
            print(lat.node(lat.join(args.a, args.b)).label)
        elif args.op == "path":
            chain = lat.construction_chain(args.a, args.b)
            print(chain.start.label)
            for node, added in chain.steps:
                print(f"  + {added.text} -> {node.label}")
    except (UnknownNodeError, NotComparableError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    return EXIT_OK


def cmd_explain(args) -> int:
    try:
        v = vector_from_names(args.vector)
    except VectorParseError as exc:
        return _fail(EXIT_INPUT, str(exc))
    result = classify(v)
    print(f"vector: {v}")
    violations = is_consistent(v)
    print("consistency: " + ("ok" if not violations else "; ".join(map(str, violations))))
    print(f"outcome: {result.outcome_kind}")
    if result.matched:
        print("classes: " + ", ".join(map(str, result.matched)))
        for c in result.matched:
            print(f"  {describe_class(c)}")
    for line in result.explanation:
        print(f"  {line}")
    if result.outcome_kind is not OutcomeKind.NO_ATTACK and not result.exact:
        print("no exact class; nearest: " + ", ".join(f"{c} ({d})" for c, d in nearest_classes(v)))
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        if args.scenario == "custom":
            spec = custom(
                duration_secs=args.duration,
                attacker_count=args.attackers,
                malicious_pkts_per_src_per_window=args.pkts_per_src,
                benign_pkts_per_window=args.benign_pkts,
                target_infra=Infra(args.infra),
                seed=args.seed,
            )
        else:
            spec = preset(args.scenario, seed=args.seed)
        paths = write_scenario(spec, args.out)
    except ScenarioError as exc:
        return _fail(EXIT_USAGE, f"invalid scenario parameters: {exc}")
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot write output: {exc}")
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_check_taxonomy(args) -> int:
    results = selfcheck.run_all()
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.passed}/{r.total}")
        for failure in r.failures[:10]:
            print(f"  {failure}")
    print(selfcheck.summary_line(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="denial-taxon", description="Condition-based denial attack classifier.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify windows of flow records")
    p.add_argument("--input", required=True, help="flow records (.jsonl or .csv)")
    p.add_argument("--targets", required=True, help="target profile JSON")
    p.add_argument("--config", help=f"thresholds JSON (default: ${CONFIG_ENV})")
    p.add_argument("--window-secs", type=int)
    p.add_argument("--packet-limit", type=int)
    p.add_argument("--fraction", type=float)
    p.add_argument("--baseline-windows", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True)
    mode.add_argument("--lenient", dest="strict", action="store_false")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("lattice", help="query the attack lattice")
    lsub = p.add_subparsers(dest="op", required=True)
    for op in ("meet", "join", "leq"):
        q = lsub.add_parser(op)
        q.add_argument("a")
        q.add_argument("b")
    q = lsub.add_parser("path", help="construction chain from an upper node down to a lower one")
    q.add_argument("a", metavar="FROM")
    q.add_argument("b", metavar="TO")
    q = lsub.add_parser("export")
    q.add_argument("--format", choices=("edges", "dot"), default="edges")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("explain", help="classify a condition vector")
    p.add_argument("--vector", required=True, help='e.g. "C0,C2,C4,C5"')
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("generate", help="write a synthetic labelled scenario")
    p.add_argument("--scenario", required=True,
                   choices=("syn-flood", "mirai", "slowloris", "ddow-billing", "custom"))
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attackers", type=int, default=1)
    p.add_argument("--pkts-per-src", type=int, default=100)
    p.add_argument("--benign-pkts", type=int, default=10_000)
    p.add_argument("--infra", choices=[i.value for i in Infra], default=Infra.FIXED.value)
    p.add_argument("--duration", type=int, default=300, help="seconds")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check-taxonomy", help="run the embedded self-verification")
    p.set_defaults(func=cmd_check_taxonomy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
