"""Predicate-switching (PS) and stack-trace (ST) suspiciousness.

Both score by reachability of the failure rather than by coverage
statistics, and both only ever use failing tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TechniqueUnavailableError
from .model import Location, TestEvidence
from .ranking import SuspiciousnessList


@dataclass(frozen=True)
class CriticalPredicate:
    """A branching predicate whose switch made a failing test pass."""

    location: Location
    test_id: str
    depth_d: int  # critical predicates other than this one evaluated after it


def critical_predicates(bundle: TestEvidence) -> list[CriticalPredicate]:
    if bundle.predicate_trials is None:
        raise TechniqueUnavailableError("no predicate trials collected for this bug")
    return [
        CriticalPredicate(
            location=trial.predicate_location,
            test_id=trial.test_id,
            depth_d=trial.remaining_critical_count,
        )
        for trial in bundle.predicate_trials
        if trial.result == "passes"
    ]


def ps_rank(bundle: TestEvidence) -> SuspiciousnessList:
    """Score each critical predicate 1/10^d, max over failing tests.

    The rendered score underflows for d beyond ~300, so the ordering is
    taken from d itself; the float is display only. No critical predicate
    means an empty (but valid) list.
    """
    best_depth: dict[str, int] = {}
    for critical in critical_predicates(bundle):
        eid = critical.location.entity_id
        if eid not in best_depth or critical.depth_d < best_depth[eid]:
            best_depth[eid] = critical.depth_d
    entries = tuple(
        (eid, 10.0 ** -depth)
        for eid, depth in sorted(best_depth.items(), key=lambda kv: (kv[1], kv[0]))
    )
    return SuspiciousnessList(granularity="statement", entries=entries)


def st_rank(bundle: TestEvidence) -> SuspiciousnessList:
    """Score every statement of the k-th stack frame's function 1/k.

    Frames that do not resolve to a known function scope (library code)
    are skipped without consuming a rank index: only project entities can
    be blamed. A function recurring in one trace keeps its smallest k.
    """
    traces = bundle.stack_traces
    if traces is None:
        raise TechniqueUnavailableError("no stack traces collected for this bug")
    failing_traces = [t for t in traces if t.test_id in bundle.failing_ids]
    if not failing_traces:
        raise TechniqueUnavailableError("no stack trace for any failing test")

    program = bundle.program
    scores: dict[str, float] = {}
    for trace in failing_traces:
        rank = 0
        seen: set[str] = set()
        for frame in trace.frames:
            scope = program.scopes_by_id.get(frame)
            if scope is None or scope.level != "function":
                continue
            if frame in seen:
                continue
            seen.add(frame)
            rank += 1
            frame_score = 1.0 / rank
            for eid in program.locations_under(frame):
                if frame_score > scores.get(eid, 0.0):
                    scores[eid] = frame_score

    entries = tuple(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))
    return SuspiciousnessList(granularity="statement", entries=entries)
