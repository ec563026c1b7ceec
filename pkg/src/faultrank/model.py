"""Shared data model for programs, tests, and dynamic evidence.

All types are immutable after ingestion and safe to share read-only
across parallel scorers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from .errors import UnknownEntityError

GRANULARITIES = ("statement", "function", "module")
LOCATION_KINDS = ("plain", "branching-predicate")
SCOPE_LEVELS = ("function", "class", "module")
OUTCOMES = ("pass", "fail")
KILL_RELATIONS = ("same", "pass-to-fail", "fail-to-pass", "fail-different-trace")
PREDICATE_RESULTS = ("still-fails", "passes")


def entity_id(module_path: str, line: int) -> str:
    """Canonical statement-entity key, also the wire spelling ("path:line")."""
    return f"{module_path}:{line}"


def split_entity_id(eid: str) -> tuple[str, int]:
    path, _, line = eid.rpartition(":")
    return path, int(line)


@dataclass(frozen=True)
class Location:
    """An addressable program location at statement granularity."""

    module_path: str
    line: int
    kind: str = "plain"
    scope_id: str = ""

    @property
    def entity_id(self) -> str:
        return entity_id(self.module_path, self.line)


@dataclass(frozen=True)
class Scope:
    scope_id: str
    level: str  # function | class | module
    module_path: str
    parent: Optional[str] = None


@dataclass(frozen=True)
class ProgramModel:
    locations: tuple[Location, ...]
    scopes: tuple[Scope, ...]
    entity_count_by_granularity: Mapping[str, int] = field(default_factory=dict)

    @cached_property
    def scopes_by_id(self) -> dict[str, Scope]:
        return {s.scope_id: s for s in self.scopes}

    @cached_property
    def locations_by_id(self) -> dict[str, Location]:
        return {loc.entity_id: loc for loc in self.locations}

    def location(self, eid: str) -> Location:
        try:
            return self.locations_by_id[eid]
        except KeyError:
            raise UnknownEntityError(f"unknown location {eid!r}") from None

    def has_location(self, eid: str) -> bool:
        return eid in self.locations_by_id

    def scope_chain(self, scope_id: str) -> tuple[Scope, ...]:
        """Scopes from the given one up to its root, innermost first.

        Raises UnknownEntityError on dangling parents; cycles are cut off
        (validation reports them as violations).
        """
        chain: list[Scope] = []
        seen: set[str] = set()
        current: Optional[str] = scope_id
        while current is not None:
            if current in seen:
                break
            seen.add(current)
            scope = self.scopes_by_id.get(current)
            if scope is None:
                raise UnknownEntityError(f"unknown scope {current!r}")
            chain.append(scope)
            current = scope.parent
        return tuple(chain)

    def unit_id(self, loc: Location, granularity: str) -> str:
        """Aggregation unit of a statement at the given granularity.

        function: the innermost enclosing function scope; statements not
        inside any function fall back to their own (class or module) scope
        so that every statement maps to exactly one unit.
        module: the root of the scope chain.
        """
        if granularity == "statement":
            return loc.entity_id
        chain = self.scope_chain(loc.scope_id)
        if granularity == "module":
            return chain[-1].scope_id
        if granularity == "function":
            for scope in chain:
                if scope.level == "function":
                    return scope.scope_id
            return chain[0].scope_id
        raise ValueError(f"unknown granularity {granularity!r}")

    def entity_ids(self, granularity: str) -> frozenset[str]:
        if granularity == "statement":
            return frozenset(self.locations_by_id)
        return frozenset(self.unit_id(loc, granularity) for loc in self.locations)

    def entity_count(self, granularity: str) -> int:
        declared = self.entity_count_by_granularity.get(granularity)
        if declared is not None:
            return int(declared)
        return len(self.entity_ids(granularity))

    @cached_property
    def _locations_by_scope(self) -> dict[str, tuple[str, ...]]:
        under: dict[str, list[str]] = {}
        for loc in self.locations:
            for scope in self.scope_chain(loc.scope_id):
                under.setdefault(scope.scope_id, []).append(loc.entity_id)
        return {sid: tuple(ids) for sid, ids in under.items()}

    def locations_under(self, scope_id: str) -> tuple[str, ...]:
        """Statement entity ids whose scope chain passes through scope_id."""
        return self._locations_by_scope.get(scope_id, ())


@dataclass(frozen=True)
class TestOutcome:
    test_id: str
    outcome: str  # pass | fail
    crashed: bool = False  # failing test terminated with an uncaught exception


@dataclass(frozen=True)
class CoverageSpectrum:
    """Per-test sets of executed statement entity ids."""

    per_test: Mapping[str, frozenset[str]]

    def covered_by(self, test_id: str) -> frozenset[str]:
        return self.per_test.get(test_id, frozenset())


@dataclass(frozen=True)
class MutantRecord:
    mutant_id: str
    mutated_location: Location
    relations: Mapping[str, str]  # test_id -> kill relation; "same" may be omitted

    def relation(self, test_id: str) -> str:
        return self.relations.get(test_id, "same")


@dataclass(frozen=True)
class KillMatrix:
    mutants: tuple[MutantRecord, ...]


@dataclass(frozen=True)
class PredicateTrial:
    test_id: str
    predicate_location: Location
    evaluation_index: int
    result: str  # still-fails | passes
    remaining_critical_count: int  # d: critical predicates evaluated after this one


@dataclass(frozen=True)
class StackTrace:
    test_id: str
    frames: tuple[str, ...]  # function scope_ids, index 0 = most recently called


@dataclass(frozen=True)
class TestEvidence:
    """Everything recorded about one bug's test runs."""

    program: ProgramModel
    outcomes: tuple[TestOutcome, ...]
    spectrum: CoverageSpectrum
    kill_matrix: Optional[KillMatrix] = None
    predicate_trials: Optional[tuple[PredicateTrial, ...]] = None
    stack_traces: Optional[tuple[StackTrace, ...]] = None

    @cached_property
    def failing_ids(self) -> frozenset[str]:
        return frozenset(o.test_id for o in self.outcomes if o.outcome == "fail")

    @cached_property
    def passing_ids(self) -> frozenset[str]:
        return frozenset(o.test_id for o in self.outcomes if o.outcome == "pass")


@dataclass(frozen=True)
class CoverageCounts:
    fplus: int   # failing tests covering the entity
    fminus: int  # failing tests not covering it
    pplus: int   # passing tests covering it
    pminus: int  # passing tests not covering it


def coverage_counts(bundle: TestEvidence, entity: Location | str) -> CoverageCounts:
    """Per-entity coverage counts; the four always sum to the test total."""
    eid = entity if isinstance(entity, str) else entity.entity_id
    if not bundle.program.has_location(eid):
        raise UnknownEntityError(f"unknown location {eid!r}")
    fplus = sum(1 for t in bundle.failing_ids if eid in bundle.spectrum.covered_by(t))
    pplus = sum(1 for t in bundle.passing_ids if eid in bundle.spectrum.covered_by(t))
    return CoverageCounts(
        fplus=fplus,
        fminus=len(bundle.failing_ids) - fplus,
        pplus=pplus,
        pminus=len(bundle.passing_ids) - pplus,
    )


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_evidence(bundle: TestEvidence) -> list[Violation]:
    """Check every structural invariant; empty list iff the bundle is well-formed."""
    out: list[Violation] = []
    program = bundle.program

    seen_scopes: set[str] = set()
    for scope in program.scopes:
        if scope.scope_id in seen_scopes:
            out.append(Violation("duplicate-scope", f"scope {scope.scope_id!r} defined twice"))
        seen_scopes.add(scope.scope_id)
        if scope.level not in SCOPE_LEVELS:
            out.append(Violation("bad-scope-level", f"scope {scope.scope_id!r} level {scope.level!r}"))
        if scope.parent is None and scope.level != "module":
            out.append(Violation("bad-scope-root", f"root scope {scope.scope_id!r} is not module-level"))
        if scope.parent is not None and scope.parent not in program.scopes_by_id:
            out.append(Violation("unknown-scope", f"scope {scope.scope_id!r} parent {scope.parent!r} undefined"))

    for scope in program.scopes:
        seen: set[str] = set()
        current: Optional[str] = scope.scope_id
        while current is not None:
            if current in seen:
                out.append(Violation("scope-cycle", f"scope chain through {scope.scope_id!r} cycles"))
                break
            seen.add(current)
            parent_scope = program.scopes_by_id.get(current)
            current = parent_scope.parent if parent_scope is not None else None

    seen_locations: set[str] = set()
    for loc in program.locations:
        eid = loc.entity_id
        if eid in seen_locations:
            out.append(Violation("duplicate-location", f"location {eid} defined twice"))
        seen_locations.add(eid)
        if loc.line < 1:
            out.append(Violation("bad-line", f"location {eid} has line < 1"))
        if loc.kind not in LOCATION_KINDS:
            out.append(Violation("bad-kind", f"location {eid} kind {loc.kind!r}"))
        scope = program.scopes_by_id.get(loc.scope_id)
        if scope is None:
            out.append(Violation("unknown-scope", f"location {eid} scope {loc.scope_id!r} undefined"))
            continue
        try:
            chain = program.scope_chain(loc.scope_id)
        except UnknownEntityError:
            continue  # dangling parent already reported
        if any(s.module_path != loc.module_path for s in chain):
            out.append(Violation("scope-module-mismatch", f"location {eid} scope chain crosses modules"))

    declared = program.entity_count_by_granularity.get("statement")
    if declared is not None and declared != len(program.locations):
        out.append(Violation(
            "bad-entity-count",
            f"statement entity count {declared} != {len(program.locations)} locations",
        ))

    seen_tests: set[str] = set()
    for outcome in bundle.outcomes:
        if outcome.test_id in seen_tests:
            out.append(Violation("duplicate-test", f"test {outcome.test_id!r} recorded twice"))
        seen_tests.add(outcome.test_id)
        if outcome.outcome not in OUTCOMES:
            out.append(Violation("bad-outcome", f"test {outcome.test_id!r} outcome {outcome.outcome!r}"))
        if outcome.crashed and outcome.outcome != "fail":
            out.append(Violation("crashed-but-passed", f"test {outcome.test_id!r} crashed yet passed"))

    if not bundle.failing_ids:
        out.append(Violation("no-failing-test", "no failing test in bundle (F must be nonempty)"))

    for test_id, covered in sorted(bundle.spectrum.per_test.items()):
        if test_id not in seen_tests:
            out.append(Violation("unknown-test", f"coverage for unknown test {test_id!r}"))
        for eid in sorted(covered):
            if not program.has_location(eid):
                out.append(Violation("unknown-location", f"coverage of {test_id!r} references {eid}"))

    if bundle.kill_matrix is not None:
        seen_mutants: set[str] = set()
        for mutant in bundle.kill_matrix.mutants:
            if mutant.mutant_id in seen_mutants:
                out.append(Violation("duplicate-mutant", f"mutant {mutant.mutant_id!r} recorded twice"))
            seen_mutants.add(mutant.mutant_id)
            if not program.has_location(mutant.mutated_location.entity_id):
                out.append(Violation(
                    "unknown-location",
                    f"mutant {mutant.mutant_id!r} mutates unknown {mutant.mutated_location.entity_id}",
                ))
            for test_id, relation in sorted(mutant.relations.items()):
                if relation not in KILL_RELATIONS:
                    out.append(Violation("bad-relation", f"mutant {mutant.mutant_id!r} relation {relation!r}"))
                    continue
                if test_id not in seen_tests:
                    out.append(Violation("unknown-test", f"mutant {mutant.mutant_id!r} kills unknown {test_id!r}"))
                    continue
                failing = test_id in bundle.failing_ids
                if relation == "pass-to-fail" and failing:
                    out.append(Violation(
                        "relation-outcome-mismatch",
                        f"mutant {mutant.mutant_id!r}: pass-to-fail for failing test {test_id!r}",
                    ))
                if relation in ("fail-to-pass", "fail-different-trace") and not failing:
                    out.append(Violation(
                        "relation-outcome-mismatch",
                        f"mutant {mutant.mutant_id!r}: {relation} for passing test {test_id!r}",
                    ))

    if bundle.predicate_trials is not None:
        for trial in bundle.predicate_trials:
            loc = trial.predicate_location
            if trial.test_id not in bundle.failing_ids:
                out.append(Violation("trial-not-failing", f"predicate trial for non-failing test {trial.test_id!r}"))
            if not program.has_location(loc.entity_id):
                out.append(Violation("unknown-location", f"predicate trial references {loc.entity_id}"))
            elif program.location(loc.entity_id).kind != "branching-predicate":
                out.append(Violation("not-a-predicate", f"trial location {loc.entity_id} is not a branching predicate"))
            if trial.result not in PREDICATE_RESULTS:
                out.append(Violation("bad-trial-result", f"trial result {trial.result!r}"))
            if trial.evaluation_index < 0 or trial.remaining_critical_count < 0:
                out.append(Violation("bad-trial-index", f"negative index in trial at {loc.entity_id}"))

    if bundle.stack_traces is not None:
        for trace in bundle.stack_traces:
            if trace.test_id not in bundle.failing_ids:
                out.append(Violation("trace-not-failing", f"stack trace for non-failing test {trace.test_id!r}"))
            if not trace.frames:
                out.append(Violation("empty-trace", f"stack trace of {trace.test_id!r} has no frames"))

    return out


def resolve_location(program: ProgramModel, module_path: str, line: int) -> Location:
    """Look up the model's Location for (module_path, line)."""
    return program.location(entity_id(module_path, line))


def iter_statement_ids(locations: Iterable[Location]) -> frozenset[str]:
    return frozenset(loc.entity_id for loc in locations)
