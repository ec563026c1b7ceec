"""End-to-end driver: discover bug bundles, run techniques, evaluate
against ground truth, aggregate corpus tables, render reports.

All outputs are deterministic for a fixed config; the one physical
nondeterminism source (wall-clock timing) can be zeroed with
fixed_clock for byte-identical reruns.
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import metrics
from .errors import FaultrankError, TechniqueUnavailableError
from .fusion import (
    FAMILY_OF_TECHNIQUE,
    FusionConfig,
    export_ltr,
)
from .ground_truth import BugKind, GroundTruth, classify_bug, derive_ground_truth
from .mbfl import mbfl_rank
from .model import TestEvidence, validate_evidence
from .ranking import SuspiciousnessList
from .reachability import ps_rank, st_rank
from .sbfl import SbflFormula, sbfl_rank
from .stats import (
    PairedVectors,
    cliffs_delta,
    kendall_tau,
    wilcoxon_signed_rank,
)
from .wire import EDITS_FILE, PROGRAM_FILE, LoadedBug, load_bundle

STANDALONE_TECHNIQUES = ("tarantula", "ochiai", "dstar", "metallaxis", "muse", "ps", "st")
COMBINED_TECHNIQUES = ("avgfl_a", "avgfl_s")
ALL_TECHNIQUES = STANDALONE_TECHNIQUES + COMBINED_TECHNIQUES

FAMILIES = {
    "sbfl": ("tarantula", "ochiai", "dstar"),
    "mbfl": ("metallaxis", "muse"),
    "ps": ("ps",),
    "st": ("st",),
}

REPORT_COLUMNS = (
    "bug_id", "technique", "granularity", "e_inspect", "gen_e_inspect", "exam",
    "at1", "at3", "at5", "at10", "list_length", "seconds",
)

AT_NS = (1, 3, 5, 10)


@dataclass(frozen=True)
class RunConfig:
    corpus_root: str
    techniques: tuple[str, ...]
    granularities: tuple[str, ...] = ("statement",)
    output_dir: str = "out"
    weights: Mapping[str, float] = field(default_factory=dict)
    parallelism: int = 1
    fixed_clock: bool = False  # report 0.0 seconds for byte-identical reruns
    export_ltr_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.techniques:
            raise ValueError("at least one technique is required")
        unknown = [t for t in self.techniques if t not in ALL_TECHNIQUES]
        if unknown:
            raise ValueError(f"unknown techniques: {unknown}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be positive")


@dataclass
class MetricRow:
    bug_id: str
    technique: str
    granularity: str
    available: bool
    e_inspect: Optional[float] = None
    gen_e_inspect: Optional[float] = None
    exam: Optional[float] = None
    at_n: dict[int, bool] = field(default_factory=dict)
    list_length: Optional[int] = None
    seconds: Optional[float] = None


@dataclass
class BugOutcome:
    bug_id: str
    status: str  # ok | error
    error: str = ""
    category: str = ""
    kind: Optional[BugKind] = None
    rows: list[MetricRow] = field(default_factory=list)
    rankings: dict[tuple[str, str], SuspiciousnessList] = field(default_factory=dict)
    ltr_csv: Optional[str] = None


def _rank_statement(
    technique: str,
    evidence: TestEvidence,
    member_lists: dict[str, SuspiciousnessList],
    weights: Mapping[str, float],
) -> SuspiciousnessList:
    if technique in ("tarantula", "ochiai", "dstar"):
        return sbfl_rank(evidence, SbflFormula(variant=technique))
    if technique in ("metallaxis", "muse"):
        return mbfl_rank(evidence, technique)
    if technique == "ps":
        return ps_rank(evidence)
    if technique == "st":
        return st_rank(evidence)
    if technique == "avgfl_a":
        return _fuse(member_lists, FusionConfig.avgfl_a(weights))
    if technique == "avgfl_s":
        return _fuse(member_lists, FusionConfig.avgfl_s(weights))
    raise ValueError(f"unknown technique {technique!r}")


def _fuse(member_lists: dict[str, SuspiciousnessList], config: FusionConfig) -> SuspiciousnessList:
    from .fusion import avgfl_rank

    available = {t: sl for t, sl in member_lists.items() if t in config.member_techniques}
    return avgfl_rank(available, config)


def _member_lists(
    evidence: TestEvidence,
    needed: Sequence[str],
) -> dict[str, SuspiciousnessList]:
    lists: dict[str, SuspiciousnessList] = {}
    for technique in needed:
        try:
            lists[technique] = _rank_statement(technique, evidence, {}, {})
        except TechniqueUnavailableError:
            continue
    return lists


def evaluate_bug(bundle_dir: str, config: RunConfig) -> BugOutcome:
    """All techniques, all granularities, for one bug directory."""
    bug_id = Path(bundle_dir).name
    try:
        loaded: LoadedBug = load_bundle(bundle_dir)
        bug_id = loaded.bug_id
        violations = validate_evidence(loaded.evidence)
        if violations:
            summary = "; ".join(str(v) for v in violations[:5])
            return BugOutcome(bug_id=bug_id, status="error", error=f"invalid bundle: {summary}")
        if loaded.edits is None:
            return BugOutcome(bug_id=bug_id, status="error", error=f"missing {EDITS_FILE}")
        truth = derive_ground_truth(loaded.edits, loaded.evidence.program)
    except FaultrankError as exc:
        return BugOutcome(bug_id=bug_id, status="error", error=str(exc))

    evidence = loaded.evidence
    kind = classify_bug(truth, evidence)
    outcome = BugOutcome(
        bug_id=bug_id,
        status="ok",
        category=str(loaded.meta.get("category", "")),
        kind=kind,
    )

    fusion_requested = any(t in COMBINED_TECHNIQUES for t in config.techniques)
    member_pool = set(FusionConfig.avgfl_a().member_techniques) | set(
        FusionConfig.avgfl_s().member_techniques)
    member_lists = _member_lists(evidence, sorted(member_pool)) if fusion_requested else {}

    for technique in config.techniques:
        started = time.perf_counter()
        try:
            statement_list = _rank_statement(technique, evidence, member_lists, config.weights)
        except TechniqueUnavailableError:
            for granularity in config.granularities:
                outcome.rows.append(MetricRow(
                    bug_id=bug_id, technique=technique, granularity=granularity,
                    available=False,
                ))
            continue
        elapsed = 0.0 if config.fixed_clock else time.perf_counter() - started

        for granularity in config.granularities:
            if granularity == "statement":
                slist = statement_list
            else:
                slist = metrics.aggregate_granularity(statement_list, evidence.program, granularity)
            record = metrics.evaluate_list(
                slist,
                truth.truth_ids(granularity),
                evidence.program,
                wall_clock_s=elapsed,
                ns=AT_NS,
            )
            outcome.rankings[(technique, granularity)] = slist
            outcome.rows.append(MetricRow(
                bug_id=bug_id, technique=technique, granularity=granularity,
                available=True,
                e_inspect=record.e_inspect,
                gen_e_inspect=record.generalized_e_inspect,
                exam=record.exam_score,
                at_n=record.at_n,
                list_length=record.list_length,
                seconds=elapsed,
            ))

    if config.export_ltr_dir is not None:
        features = _member_lists(evidence, STANDALONE_TECHNIQUES)
        feature_order = tuple(t for t in STANDALONE_TECHNIQUES if t in features)
        outcome.ltr_csv = export_ltr(features, truth.truth_ids("statement"), feature_order)
    return outcome


def discover_bugs(corpus_root: str) -> list[str]:
    root = Path(corpus_root)
    if not root.is_dir():
        raise FaultrankError(f"corpus root {corpus_root!r} does not exist")
    dirs = sorted(str(p) for p in root.iterdir() if p.is_dir() and (p / PROGRAM_FILE).exists())
    return dirs


@dataclass
class RunResult:
    outcomes: list[BugOutcome]
    exit_code: int

    @property
    def rows(self) -> list[MetricRow]:
        return [row for outcome in self.outcomes for row in outcome.rows]

    @property
    def errors(self) -> list[BugOutcome]:
        return [o for o in self.outcomes if o.status == "error"]


def _evaluate_for_pool(args: tuple[str, RunConfig]) -> BugOutcome:
    return evaluate_bug(*args)


def run_corpus(config: RunConfig) -> RunResult:
    bundle_dirs = discover_bugs(config.corpus_root)
    if not bundle_dirs:
        raise FaultrankError(f"no bug bundles under {config.corpus_root!r}")

    jobs = config.parallelism
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_evaluate_for_pool, [(d, config) for d in bundle_dirs]))
    else:
        outcomes = [evaluate_bug(d, config) for d in bundle_dirs]
    outcomes.sort(key=lambda o: o.bug_id)

    exit_code = 2 if any(o.status == "error" for o in outcomes) else 0
    result = RunResult(outcomes=outcomes, exit_code=exit_code)
    write_reports(result, config)
    return result


# ---------------------------------------------------------------------------
# report rendering


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(value, ".12g")


def _fmt_seconds(value: Optional[float]) -> str:
    if value is None:
        return ""
    return format(value, ".6f")


def _row_cells(row: MetricRow) -> list[str]:
    if not row.available:
        return [row.bug_id, row.technique, row.granularity, "", "", "", "", "", "", "", "", ""]
    return [
        row.bug_id,
        row.technique,
        row.granularity,
        _fmt(row.e_inspect),
        _fmt(row.gen_e_inspect),
        _fmt(row.exam),
        *[("1" if row.at_n.get(n, False) else "0") for n in AT_NS],
        str(row.list_length),
        _fmt_seconds(row.seconds),
    ]


def render_report_csv(rows: Sequence[MetricRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow(_row_cells(row))
    return buffer.getvalue()


SUBSET_ORDER = ("all", "crashing", "predicate", "mutable")


def _bug_subsets(outcomes: Sequence[BugOutcome]) -> dict[str, set[str]]:
    subsets: dict[str, set[str]] = {name: set() for name in SUBSET_ORDER}
    for outcome in outcomes:
        if outcome.status != "ok" or outcome.kind is None:
            continue
        subsets["all"].add(outcome.bug_id)
        if outcome.kind.crashing:
            subsets["crashing"].add(outcome.bug_id)
        if outcome.kind.predicate:
            subsets["predicate"].add(outcome.bug_id)
        if outcome.kind.mutable:
            subsets["mutable"].add(outcome.bug_id)
        if outcome.category:
            subsets.setdefault(f"category={outcome.category}", set()).add(outcome.bug_id)
    return subsets


@dataclass
class SummaryRow:
    technique: str
    granularity: str
    subset: str
    n_bugs: int
    n_evaluated: int
    at_pct: dict[int, Optional[float]]
    mean_gen_e_inspect: Optional[float]
    mean_exam: Optional[float]
    mean_list_length: Optional[float]
    mean_seconds: Optional[float]


def _mean(values: list[float]) -> Optional[float]:
    return sum(values) / len(values) if values else None


def summarize(
    rows: Sequence[MetricRow],
    subsets: Mapping[str, set[str]],
    techniques: Sequence[str],
    granularities: Sequence[str],
) -> list[SummaryRow]:
    """Per (technique, granularity, subset) aggregates.

    Bugs where a technique is unavailable are excluded from that
    technique's denominators; the mean exam score covers localized bugs
    only, every other mean covers all evaluated bugs of the subset.
    """
    out: list[SummaryRow] = []
    subset_names = [s for s in SUBSET_ORDER if s in subsets]
    subset_names += sorted(s for s in subsets if s.startswith("category="))
    for technique in techniques:
        for granularity in granularities:
            matching = [
                r for r in rows
                if r.technique == technique and r.granularity == granularity
            ]
            for subset in subset_names:
                bug_ids = subsets[subset]
                evaluated = [r for r in matching if r.bug_id in bug_ids and r.available]
                at_pct: dict[int, Optional[float]] = {}
                for n in AT_NS:
                    at_pct[n] = (
                        100.0 * sum(1 for r in evaluated if r.at_n.get(n, False)) / len(evaluated)
                        if evaluated else None
                    )
                out.append(SummaryRow(
                    technique=technique,
                    granularity=granularity,
                    subset=subset,
                    n_bugs=len(bug_ids),
                    n_evaluated=len(evaluated),
                    at_pct=at_pct,
                    mean_gen_e_inspect=_mean([r.gen_e_inspect for r in evaluated
                                              if r.gen_e_inspect is not None]),
                    mean_exam=_mean([r.exam for r in evaluated if r.exam is not None]),
                    mean_list_length=_mean([float(r.list_length) for r in evaluated
                                            if r.list_length is not None]),
                    mean_seconds=_mean([r.seconds for r in evaluated if r.seconds is not None]),
                ))
    out.extend(_family_rows(out, techniques))
    return out


def _family_rows(rows: list[SummaryRow], techniques: Sequence[str]) -> list[SummaryRow]:
    """One row per family: the arithmetic mean of its member-technique rows."""
    out: list[SummaryRow] = []
    for family, members in FAMILIES.items():
        present = [t for t in members if t in techniques]
        if len(present) < 2:
            continue  # single-member family rows would duplicate the technique row
        keys = {(r.granularity, r.subset) for r in rows if r.technique in present}
        for granularity, subset in sorted(keys):
            member_rows = [
                r for r in rows
                if r.technique in present and r.granularity == granularity and r.subset == subset
            ]
            def mean_of(values: list[Optional[float]]) -> Optional[float]:
                known = [v for v in values if v is not None]
                return sum(known) / len(known) if known else None

            out.append(SummaryRow(
                technique=f"family:{family}",
                granularity=granularity,
                subset=subset,
                n_bugs=member_rows[0].n_bugs,
                n_evaluated=max(r.n_evaluated for r in member_rows),
                at_pct={n: mean_of([r.at_pct[n] for r in member_rows]) for n in AT_NS},
                mean_gen_e_inspect=mean_of([r.mean_gen_e_inspect for r in member_rows]),
                mean_exam=mean_of([r.mean_exam for r in member_rows]),
                mean_list_length=mean_of([r.mean_list_length for r in member_rows]),
                mean_seconds=mean_of([r.mean_seconds for r in member_rows]),
            ))
    return out


def render_summary_csv(rows: Sequence[SummaryRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([
        "technique", "granularity", "subset", "n_bugs", "n_evaluated",
        "at1_pct", "at3_pct", "at5_pct", "at10_pct",
        "mean_gen_e_inspect", "mean_exam", "mean_list_length", "mean_seconds",
    ])
    for row in rows:
        writer.writerow([
            row.technique, row.granularity, row.subset,
            str(row.n_bugs), str(row.n_evaluated),
            *[_fmt(row.at_pct[n]) for n in AT_NS],
            _fmt(row.mean_gen_e_inspect),
            _fmt(row.mean_exam),
            _fmt(row.mean_list_length),
            _fmt(row.mean_seconds),
        ])
    return buffer.getvalue()


# qualitative comparison operators over @n percentage gaps and mean runtimes


def effectiveness_relation(at_a: Mapping[int, float], at_b: Mapping[int, float]) -> str:
    def one_way(x: Mapping[int, float], y: Mapping[int, float]) -> Optional[str]:
        gaps = [x[n] - y[n] for n in AT_NS]
        if all(g > 0 for g in gaps) and sum(1 for g in gaps if g >= 10) >= 3:
            return "much-more"
        if all(g > 0 for g in gaps) and any(g >= 5 for g in gaps):
            return "more"
        if all(g >= 0 for g in gaps) and sum(1 for g in gaps if g > 0) >= 3:
            return "tends-more"
        return None

    forward = one_way(at_a, at_b)
    if forward == "much-more":
        return ">>"
    if forward == "more":
        return ">"
    backward = one_way(at_b, at_a)
    if backward == "much-more":
        return "<<"
    if backward == "more":
        return "<"
    if forward == "tends-more":
        return ">="
    if backward == "tends-more":
        return "<="
    return "~="


def efficiency_relation(seconds_a: float, seconds_b: float) -> str:
    """A is (much) more efficient than B when B takes (10x) 1.1x longer."""
    if seconds_b > 10 * seconds_a:
        return ">>"
    if seconds_a > 10 * seconds_b:
        return "<<"
    if seconds_b > 1.1 * seconds_a:
        return ">"
    if seconds_a > 1.1 * seconds_b:
        return "<"
    return "~="


def render_qualitative_csv(summary: Sequence[SummaryRow], techniques: Sequence[str]) -> str:
    rows_by_key = {
        (r.technique, r.granularity, r.subset): r for r in summary
    }
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["granularity", "a", "b", "effectiveness", "efficiency"])
    granularities = sorted({r.granularity for r in summary})
    for granularity in granularities:
        for i, tech_a in enumerate(techniques):
            for tech_b in techniques[i + 1:]:
                row_a = rows_by_key.get((tech_a, granularity, "all"))
                row_b = rows_by_key.get((tech_b, granularity, "all"))
                if row_a is None or row_b is None:
                    continue
                if any(row.n_evaluated == 0 for row in (row_a, row_b)):
                    continue
                effectiveness = effectiveness_relation(row_a.at_pct, row_b.at_pct)
                if row_a.mean_seconds is None or row_b.mean_seconds is None:
                    efficiency = ""
                else:
                    efficiency = efficiency_relation(row_a.mean_seconds, row_b.mean_seconds)
                writer.writerow([granularity, tech_a, tech_b, effectiveness, efficiency])
    return buffer.getvalue()


def write_reports(result: RunResult, config: RunConfig) -> None:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    (out / "report.csv").write_text(render_report_csv(result.rows), encoding="utf-8")

    subsets = _bug_subsets(result.outcomes)
    summary = summarize(result.rows, subsets, config.techniques, config.granularities)
    (out / "summary.csv").write_text(render_summary_csv(summary), encoding="utf-8")
    (out / "qualitative.csv").write_text(
        render_qualitative_csv(summary, config.techniques), encoding="utf-8")

    if result.errors:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["bug_id", "error"])
        for outcome in result.errors:
            writer.writerow([outcome.bug_id, outcome.error])
        (out / "errors.csv").write_text(buffer.getvalue(), encoding="utf-8")

    rankings_dir = out / "rankings"
    for outcome in result.outcomes:
        for (technique, granularity), slist in sorted(outcome.rankings.items()):
            bug_dir = rankings_dir / outcome.bug_id
            bug_dir.mkdir(parents=True, exist_ok=True)
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(["entity", "score"])
            for eid, score in slist:
                writer.writerow([eid, _fmt(score)])
            (bug_dir / f"{technique}.{granularity}.csv").write_text(
                buffer.getvalue(), encoding="utf-8")

    if config.export_ltr_dir is not None:
        ltr_dir = Path(config.export_ltr_dir)
        ltr_dir.mkdir(parents=True, exist_ok=True)
        for outcome in result.outcomes:
            if outcome.ltr_csv is not None:
                (ltr_dir / f"{outcome.bug_id}.csv").write_text(outcome.ltr_csv, encoding="utf-8")

    (out / "run_meta.json").write_text(json.dumps({
        "corpus_root": config.corpus_root,
        "techniques": list(config.techniques),
        "granularities": list(config.granularities),
        "weights": dict(config.weights),
        "fixed_clock": config.fixed_clock,
        "tau_variant": "b",
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# pairwise comparison over a rendered report

COMPARE_METRICS = {
    "einspect": "gen_e_inspect",  # generalized: defined for every evaluated bug
    "gen_einspect": "gen_e_inspect",
    "exam": "exam",
    "list_length": "list_length",
    "seconds": "seconds",
}


def _metric_value(row: dict[str, str], column: str) -> Optional[float]:
    raw = row.get(column, "")
    return float(raw) if raw else None


def read_report_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def compare_report(
    report_path: str | Path,
    side_a: str,
    side_b: str,
    metric: str = "einspect",
    granularity: str = "statement",
) -> dict:
    """Kendall tau, Wilcoxon p, and Cliff's delta between two techniques
    or families over their per-bug metric vectors.
    """
    if metric not in COMPARE_METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(COMPARE_METRICS)}")
    column = COMPARE_METRICS[metric]
    rows = [r for r in read_report_csv(report_path) if r["granularity"] == granularity]

    def vector(side: str) -> dict[str, float]:
        members = FAMILIES.get(side, (side,))
        per_bug: dict[str, list[float]] = {}
        for row in rows:
            if row["technique"] not in members:
                continue
            value = _metric_value(row, column)
            if value is not None:
                per_bug.setdefault(row["bug_id"], []).append(value)
        return {bug: sum(vs) / len(vs) for bug, vs in per_bug.items()}

    values_a = vector(side_a)
    values_b = vector(side_b)
    shared = sorted(set(values_a) & set(values_b))
    if not shared:
        raise FaultrankError(f"no bug has {metric} values for both {side_a!r} and {side_b!r}")
    pair = PairedVectors(
        bug_ids=tuple(shared),
        values_a=tuple(values_a[b] for b in shared),
        values_b=tuple(values_b[b] for b in shared),
    )

    report: dict = {
        "a": side_a,
        "b": side_b,
        "metric": metric,
        "granularity": granularity,
        "n": len(shared),
        "tau_variant": "b",
    }
    try:
        tau = kendall_tau(pair)
        report["tau"] = tau.tau
        report["tau_band"] = tau.band
    except (FaultrankError, ValueError) as exc:
        report["tau_error"] = str(exc)
    try:
        report["wilcoxon_p"] = wilcoxon_signed_rank(pair)
    except (FaultrankError, ValueError) as exc:
        report["wilcoxon_error"] = str(exc)
    delta = cliffs_delta(pair)
    report["cliffs_delta"] = delta.delta
    report["delta_band"] = delta.band
    return report


def jobs_from_env(default: int = 1) -> int:
    raw = os.environ.get("FAULTRANK_JOBS", "")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default
