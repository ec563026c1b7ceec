"""Command line interface.

    faultrank run --corpus DIR --techniques LIST --granularity statement,function \
        --out DIR [--weights sbfl=3,mbfl=2,ps=1,st=1] [--export-ltr DIR] [--fixed-clock]
    faultrank compare --report CSV --metric einspect --a sbfl --b mbfl
    faultrank validate --bundle DIR

Exit codes: 0 success, 2 partial per-bug failures, 1 fatal error.
FAULTRANK_JOBS overrides --jobs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import FaultrankError
from .fusion import DEFAULT_FAMILY_WEIGHTS, FAMILY_OF_TECHNIQUE
from .harness import (
    ALL_TECHNIQUES,
    COMPARE_METRICS,
    RunConfig,
    compare_report,
    jobs_from_env,
    run_corpus,
)
from .model import GRANULARITIES, validate_evidence
from .wire import load_bundle


def _parse_techniques(raw: str) -> tuple[str, ...]:
    if raw == "all":
        return ALL_TECHNIQUES
    techniques = tuple(t.strip() for t in raw.split(",") if t.strip())
    unknown = [t for t in techniques if t not in ALL_TECHNIQUES]
    if unknown:
        raise FaultrankError(
            f"unknown techniques {unknown}; available: {', '.join(ALL_TECHNIQUES)}")
    return techniques


def _parse_granularities(raw: str) -> tuple[str, ...]:
    granularities = tuple(g.strip() for g in raw.split(",") if g.strip())
    unknown = [g for g in granularities if g not in GRANULARITIES]
    if unknown:
        raise FaultrankError(f"unknown granularities {unknown}")
    return granularities


def _parse_weights(raw: str) -> dict[str, float]:
    """Accepts family tokens (sbfl=3) and technique tokens (ochiai=2.5)."""
    weights: dict[str, float] = {}
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        key, _, value = token.partition("=")
        try:
            weight = float(value)
        except ValueError:
            raise FaultrankError(f"bad weight token {token!r}") from None
        if key in DEFAULT_FAMILY_WEIGHTS:
            for technique, family in FAMILY_OF_TECHNIQUE.items():
                if family == key:
                    weights[technique] = weight
        elif key in FAMILY_OF_TECHNIQUE:
            weights[key] = weight
        else:
            raise FaultrankError(f"unknown weight target {key!r}")
    return weights


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faultrank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run techniques over a corpus and render reports")
    run.add_argument("--corpus", required=True)
    run.add_argument("--techniques", default="all")
    run.add_argument("--granularity", default="statement")
    run.add_argument("--out", default="out")
    run.add_argument("--weights", default="")
    run.add_argument("--jobs", type=int, default=0, help="0 = FAULTRANK_JOBS or 1")
    run.add_argument("--export-ltr", default=None, metavar="DIR")
    run.add_argument("--fixed-clock", action="store_true",
                     help="report 0.0 seconds so reruns are byte-identical")

    compare = sub.add_parser("compare", help="pairwise statistics between techniques/families")
    compare.add_argument("--report", required=True, help="report.csv from a previous run")
    compare.add_argument("--a", required=True)
    compare.add_argument("--b", required=True)
    compare.add_argument("--metric", default="einspect", choices=sorted(COMPARE_METRICS))
    compare.add_argument("--granularity", default="statement")

    validate = sub.add_parser("validate", help="check one bundle directory")
    validate.add_argument("--bundle", required=True)
    return parser


def cmd_run(args: argparse.Namespace) -> int:
    config = RunConfig(
        corpus_root=args.corpus,
        techniques=_parse_techniques(args.techniques),
        granularities=_parse_granularities(args.granularity),
        output_dir=args.out,
        weights=_parse_weights(args.weights),
        parallelism=args.jobs if args.jobs > 0 else jobs_from_env(1),
        fixed_clock=args.fixed_clock,
        export_ltr_dir=args.export_ltr,
    )
    result = run_corpus(config)
    evaluated = sum(1 for o in result.outcomes if o.status == "ok")
    print(f"evaluated {evaluated}/{len(result.outcomes)} bugs -> {args.out}")
    for outcome in result.errors:
        print(f"error: {outcome.bug_id}: {outcome.error}", file=sys.stderr)
    return result.exit_code


def cmd_compare(args: argparse.Namespace) -> int:
    report = compare_report(
        args.report, args.a, args.b, metric=args.metric, granularity=args.granularity)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    loaded = load_bundle(args.bundle)
    violations = validate_evidence(loaded.evidence)
    for violation in violations:
        print(str(violation))
    if violations:
        print(f"{len(violations)} violation(s) in {args.bundle}")
        return 1
    print(f"ok: {args.bundle}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        return cmd_validate(args)
    except FaultrankError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
