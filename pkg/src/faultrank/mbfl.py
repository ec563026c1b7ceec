"""Mutation-based suspiciousness: Metallaxis and Muse over a kill matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InconsistentCountsError, TechniqueUnavailableError
from .model import KillMatrix, MutantRecord, TestEvidence
from .ranking import SuspiciousnessList, ranked
from .sbfl import guarded_ratio

MBFL_MODELS = ("metallaxis", "muse")


@dataclass(frozen=True)
class MutantKillCounts:
    pk: int       # passing tests the mutant makes fail (strong kill)
    fk: int       # failing tests the mutant makes pass (strong kill)
    fk_weak: int  # failing tests behaving differently (weak kill, fk included)


@dataclass(frozen=True)
class MuseGlobals:
    f2p: int  # sum of fk over all mutants
    p2f: int  # sum of pk over all mutants


def kill_counts(mutant: MutantRecord, failing_ids: frozenset[str]) -> MutantKillCounts:
    pk = fk = weak = 0
    for test_id, relation in mutant.relations.items():
        if relation == "pass-to-fail":
            pk += 1
        elif relation == "fail-to-pass":
            fk += 1
            weak += 1
        elif relation == "fail-different-trace":
            weak += 1
    if weak > len(failing_ids):
        raise InconsistentCountsError(
            f"mutant {mutant.mutant_id!r} weak-kills {weak} of {len(failing_ids)} failing tests")
    return MutantKillCounts(pk=pk, fk=fk, fk_weak=weak)


def muse_globals(matrix: KillMatrix, failing_ids: frozenset[str]) -> MuseGlobals:
    f2p = p2f = 0
    for mutant in matrix.mutants:
        counts = kill_counts(mutant, failing_ids)
        f2p += counts.fk
        p2f += counts.pk
    return MuseGlobals(f2p=f2p, p2f=p2f)


def metallaxis_mutant(counts: MutantKillCounts, f_total: int) -> float:
    """Ochiai's shape over kills instead of coverage; result in [0, 1]."""
    if f_total < 1:
        raise InconsistentCountsError("at least one failing test is required")
    return guarded_ratio(
        counts.fk_weak,
        math.sqrt(f_total * (counts.fk_weak + counts.pk)),
    )


def muse_mutant(counts: MutantKillCounts, globals_: MuseGlobals, f_total: int) -> float:
    """May be negative: passing-test kills pull the score below zero.

    With p2f = 0 no mutant was ever killed by a passing test, so the
    penalty term has no evidence behind it and is taken as 0.
    """
    if f_total < 1:
        raise InconsistentCountsError("at least one failing test is required")
    penalty = counts.pk * (globals_.f2p / globals_.p2f) if globals_.p2f > 0 else 0.0
    return (counts.fk - penalty) / f_total


def mbfl_rank(bundle: TestEvidence, model: str) -> SuspiciousnessList:
    """Per-entity score: max of its mutants' scores (metallaxis) or their
    mean (muse). Entities with no mutants are omitted.
    """
    if model not in MBFL_MODELS:
        raise ValueError(f"unknown MBFL model {model!r}")
    matrix = bundle.kill_matrix
    if matrix is None:
        raise TechniqueUnavailableError("no kill matrix collected for this bug")
    failing = bundle.failing_ids
    f_total = len(failing)

    globals_ = muse_globals(matrix, failing) if model == "muse" else None
    per_entity: dict[str, list[float]] = {}
    for mutant in matrix.mutants:
        counts = kill_counts(mutant, failing)
        if model == "metallaxis":
            score = metallaxis_mutant(counts, f_total)
        else:
            score = muse_mutant(counts, globals_, f_total)
        per_entity.setdefault(mutant.mutated_location.entity_id, []).append(score)

    if model == "metallaxis":
        scores = {eid: max(values) for eid, values in per_entity.items()}
    else:
        scores = {eid: sum(values) / len(values) for eid, values in per_entity.items()}
    return ranked(scores)
