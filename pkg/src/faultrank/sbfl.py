"""Spectrum-based suspiciousness: Tarantula, Ochiai, DStar."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InconsistentCountsError
from .model import CoverageCounts, TestEvidence
from .ranking import SuspiciousnessList, ranked

SBFL_VARIANTS = ("tarantula", "ochiai", "dstar")


@dataclass(frozen=True)
class SbflFormula:
    variant: str
    star_exponent: int = 2  # DStar's numerator power

    def __post_init__(self) -> None:
        if self.variant not in SBFL_VARIANTS:
            raise ValueError(f"unknown SBFL variant {self.variant!r}")
        if self.star_exponent < 1:
            raise ValueError("star_exponent must be positive")


def _check_counts(counts: CoverageCounts, f_total: int, p_total: int) -> None:
    if f_total < 1:
        raise InconsistentCountsError("at least one failing test is required")
    if min(counts.fplus, counts.fminus, counts.pplus, counts.pminus) < 0:
        raise InconsistentCountsError("coverage counts must be nonnegative")
    if counts.fplus + counts.fminus != f_total:
        raise InconsistentCountsError(
            f"Fplus + Fminus = {counts.fplus + counts.fminus} != |F| = {f_total}")
    if counts.pplus + counts.pminus != p_total:
        raise InconsistentCountsError(
            f"Pplus + Pminus = {counts.pplus + counts.pminus} != |P| = {p_total}")


def guarded_ratio(numerator: float, denominator: float) -> float:
    """Zero-denominator rule shared by all suspiciousness formulas:
    numerator 0 scores 0; positive numerator over zero denominator
    is maximally suspicious (+inf, ranked above every finite score).
    """
    if numerator == 0:
        return 0.0
    if denominator == 0:
        return math.inf
    return numerator / denominator


def sbfl_score(formula: SbflFormula, counts: CoverageCounts, f_total: int, p_total: int) -> float:
    _check_counts(counts, f_total, p_total)
    if formula.variant == "tarantula":
        fail_ratio = counts.fplus / f_total
        # no passing tests at all: the passing term contributes nothing
        pass_ratio = counts.pplus / p_total if p_total > 0 else 0.0
        return guarded_ratio(fail_ratio, fail_ratio + pass_ratio)
    if formula.variant == "ochiai":
        return guarded_ratio(
            counts.fplus,
            math.sqrt(f_total * (counts.fplus + counts.pplus)),
        )
    return guarded_ratio(
        float(counts.fplus ** formula.star_exponent),
        float(counts.pplus + counts.fminus),
    )


def sbfl_rank(bundle: TestEvidence, formula: SbflFormula) -> SuspiciousnessList:
    """Rank every entity covered by at least one failing test.

    Entities never covered by a failing test are omitted; the generalized
    rank metric re-adds them as a trailing tie block when needed.
    """
    failing = bundle.failing_ids
    passing = bundle.passing_ids
    fplus: dict[str, int] = {}
    pplus: dict[str, int] = {}
    for test_id in failing:
        for eid in bundle.spectrum.covered_by(test_id):
            fplus[eid] = fplus.get(eid, 0) + 1
    for test_id in passing:
        for eid in bundle.spectrum.covered_by(test_id):
            if eid in fplus:
                pplus[eid] = pplus.get(eid, 0) + 1

    scores: dict[str, float] = {}
    for eid, covered_failing in fplus.items():
        counts = CoverageCounts(
            fplus=covered_failing,
            fminus=len(failing) - covered_failing,
            pplus=pplus.get(eid, 0),
            pminus=len(passing) - pplus.get(eid, 0),
        )
        scores[eid] = sbfl_score(formula, counts, len(failing), len(passing))
    return ranked(scores)
