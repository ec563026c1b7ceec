"""Faulty locations derived from the programmer's fix, plus bug-kind labels.

A fix is an edit script against the faulty version. Removed and modified
lines map to themselves. An added line does not exist in the faulty
version, so both the location that immediately precedes and the one that
immediately follows the insertion gap stand in for it, restricted to the
scope the insertion belongs to: a statement appended at the end of a
function body must not blame the unrelated declaration that happens to
follow the function.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import EmptyGroundTruthError, UnknownEntityError
from .model import GRANULARITIES, Location, ProgramModel, TestEvidence, entity_id

EDIT_KINDS = ("add", "remove", "modify")


@dataclass(frozen=True)
class Edit:
    kind: str
    module_path: str
    faulty_version_line: Optional[int] = None      # remove / modify
    insertion_gap: Optional[tuple[Optional[int], Optional[int]]] = None  # add

    def __post_init__(self) -> None:
        if self.kind not in EDIT_KINDS:
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if self.kind in ("remove", "modify"):
            if self.faulty_version_line is None:
                raise ValueError(f"{self.kind} edit needs faulty_version_line")
        else:
            gap = self.insertion_gap
            if gap is None or (gap[0] is None and gap[1] is None):
                raise ValueError("add edit needs an insertion gap with at least one side")


@dataclass(frozen=True)
class EditScript:
    edits: tuple[Edit, ...]


@dataclass(frozen=True)
class GroundTruth:
    faulty_locations: frozenset[Location]
    contains_predicate: bool
    projections: Mapping[str, frozenset[str]]  # granularity -> entity ids

    def truth_ids(self, granularity: str) -> frozenset[str]:
        return self.projections[granularity]


@dataclass(frozen=True)
class BugKind:
    crashing: bool
    predicate: bool
    mutability: float  # percentage of mutants that mutate ground-truth lines
    mutable: bool


def _sorted_lines(program: ProgramModel, module_path: str) -> tuple[list[int], dict[int, Location]]:
    by_line = {
        loc.line: loc for loc in program.locations if loc.module_path == module_path
    }
    return sorted(by_line), by_line


def _scope_depth(program: ProgramModel, scope_id: str) -> int:
    return len(program.scope_chain(scope_id))


def _in_scope(program: ProgramModel, loc: Location, scope_id: str) -> bool:
    return any(s.scope_id == scope_id for s in program.scope_chain(loc.scope_id))


def _add_neighbors(program: ProgramModel, edit: Edit) -> set[Location]:
    """Nearest in-scope locations around an insertion gap.

    The add's own scope is not recorded anywhere (the added line only
    exists in the fixed version), so it is inferred as the deeper of the
    two neighbors' scopes; the gap between a function's last statement and
    the next top-level declaration belongs to the function.
    """
    lines, by_line = _sorted_lines(program, edit.module_path)
    if not lines:
        return set()
    before, after = edit.insertion_gap

    nearest_before: Optional[Location] = None
    if before is not None:
        idx = bisect.bisect_right(lines, before) - 1
        if idx >= 0:
            nearest_before = by_line[lines[idx]]
    nearest_after: Optional[Location] = None
    if after is not None:
        idx = bisect.bisect_left(lines, after)
        if idx < len(lines):
            nearest_after = by_line[lines[idx]]

    candidates = [c for c in (nearest_before, nearest_after) if c is not None]
    if not candidates:
        return set()
    add_scope = max(
        candidates,
        key=lambda c: _scope_depth(program, c.scope_id),
    ).scope_id
    if (
        nearest_before is not None
        and _scope_depth(program, nearest_before.scope_id) == _scope_depth(program, add_scope)
    ):
        add_scope = nearest_before.scope_id  # prefer the preceding side on depth ties

    found: set[Location] = set()
    if before is not None:
        idx = bisect.bisect_right(lines, before) - 1
        while idx >= 0:
            loc = by_line[lines[idx]]
            if _in_scope(program, loc, add_scope):
                found.add(loc)
                break
            idx -= 1
    if after is not None:
        idx = bisect.bisect_left(lines, after)
        while idx < len(lines):
            loc = by_line[lines[idx]]
            if _in_scope(program, loc, add_scope):
                found.add(loc)
                break
            idx += 1
    return found


def derive_ground_truth(script: EditScript, program: ProgramModel) -> GroundTruth:
    """Union over edits; order-independent and idempotent.

    Blank and comment lines never appear in the program model, so an edit
    naming one is an unknown line. An empty result is an error: such bugs
    carry no localizable fault and are discarded.
    """
    faulty: set[Location] = set()
    for edit in script.edits:
        if edit.kind in ("remove", "modify"):
            eid = entity_id(edit.module_path, edit.faulty_version_line)
            if not program.has_location(eid):
                raise UnknownEntityError(
                    f"{edit.kind} edit references unknown line {eid}")
            faulty.add(program.location(eid))
        else:
            faulty.update(_add_neighbors(program, edit))
    if not faulty:
        raise EmptyGroundTruthError("edit script derives no faulty location")

    projections = {
        granularity: frozenset(program.unit_id(loc, granularity) for loc in faulty)
        for granularity in GRANULARITIES
    }
    return GroundTruth(
        faulty_locations=frozenset(faulty),
        contains_predicate=any(loc.kind == "branching-predicate" for loc in faulty),
        projections=projections,
    )


def classify_bug(truth: GroundTruth, evidence: TestEvidence) -> BugKind:
    crashing = any(o.crashed for o in evidence.outcomes if o.outcome == "fail")
    mutability = 0.0
    if evidence.kill_matrix is not None and evidence.kill_matrix.mutants:
        faulty_ids = {loc.entity_id for loc in truth.faulty_locations}
        on_truth = sum(
            1 for m in evidence.kill_matrix.mutants
            if m.mutated_location.entity_id in faulty_ids
        )
        mutability = 100.0 * on_truth / len(evidence.kill_matrix.mutants)
    return BugKind(
        crashing=crashing,
        predicate=truth.contains_predicate,
        mutability=mutability,
        mutable=mutability > 0,
    )
