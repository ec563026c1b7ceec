"""Combining techniques: score normalization, weighted-average fusion,
and a feature-table export for external learning-to-rank tooling.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import AbstractSet, Mapping

from .errors import GranularityMismatchError
from .ranking import SuspiciousnessList, ranked

FAMILY_OF_TECHNIQUE = {
    "tarantula": "sbfl",
    "ochiai": "sbfl",
    "dstar": "sbfl",
    "metallaxis": "mbfl",
    "muse": "mbfl",
    "ps": "ps",
    "st": "st",
}

# relative effectiveness/applicability weights per family
DEFAULT_FAMILY_WEIGHTS = {"sbfl": 3.0, "mbfl": 2.0, "ps": 1.0, "st": 1.0}

AVGFL_A_MEMBERS = ("ochiai", "dstar", "metallaxis", "muse", "ps", "st")
AVGFL_S_MEMBERS = ("ochiai", "dstar", "st")  # skip the slow MBFL and PS families


def default_weight(technique: str) -> float:
    family = FAMILY_OF_TECHNIQUE.get(technique)
    if family is None:
        raise ValueError(f"unknown technique {technique!r}")
    return DEFAULT_FAMILY_WEIGHTS[family]


@dataclass(frozen=True)
class FusionConfig:
    member_techniques: tuple[str, ...]
    weights: Mapping[str, float] = field(default_factory=dict)
    exclude: tuple[str, ...] = ("tarantula",)

    def __post_init__(self) -> None:
        members = tuple(t for t in self.member_techniques if t not in self.exclude)
        if not members:
            raise ValueError("fusion needs at least one member technique")
        object.__setattr__(self, "member_techniques", members)
        resolved = {t: float(self.weights.get(t, default_weight(t))) for t in members}
        if any(w <= 0 for w in resolved.values()):
            raise ValueError("fusion weights must be positive")
        object.__setattr__(self, "weights", resolved)

    @classmethod
    def avgfl_a(cls, weights: Mapping[str, float] | None = None) -> "FusionConfig":
        return cls(member_techniques=AVGFL_A_MEMBERS, weights=weights or {})

    @classmethod
    def avgfl_s(cls, weights: Mapping[str, float] | None = None) -> "FusionConfig":
        return cls(member_techniques=AVGFL_S_MEMBERS, weights=weights or {})


def normalize_scores(slist: SuspiciousnessList) -> SuspiciousnessList:
    """Min-max scale finite scores into [0, 1]; +inf maps to 1.

    A degenerate range keeps the evidence/no-evidence distinction: all
    scores equal and nonzero become 1.0, an all-zero list stays 0.0.
    """
    if not slist.entries:
        return slist
    finite = [s for _, s in slist.entries if math.isfinite(s)]
    if finite:
        low, high = min(finite), max(finite)
    else:
        low = high = 0.0

    def scale(score: float) -> float:
        if math.isinf(score):
            return 1.0
        if high == low:
            return 1.0 if score != 0 else 0.0
        return (score - low) / (high - low)

    entries = tuple((eid, scale(score)) for eid, score in slist.entries)
    return SuspiciousnessList(granularity=slist.granularity, entries=entries)


def avgfl_rank(
    lists: Mapping[str, SuspiciousnessList],
    config: FusionConfig,
) -> SuspiciousnessList:
    """Weighted sum of normalized member scores over the union of entities.

    An entity is suspicious iff any member considers it so; a technique
    that does not list an entity contributes 0 for it. The sum is not
    divided by the total weight: ranking is invariant to that constant.
    """
    member_lists = {t: lists[t] for t in config.member_techniques if t in lists}
    granularities = {sl.granularity for sl in member_lists.values()}
    if len(granularities) > 1:
        raise GranularityMismatchError(f"member lists mix granularities {sorted(granularities)}")
    granularity = granularities.pop() if granularities else "statement"

    fused: dict[str, float] = {}
    for technique, slist in member_lists.items():
        weight = config.weights[technique]
        for eid, score in normalize_scores(slist):
            fused[eid] = fused.get(eid, 0.0) + weight * score
    return ranked(fused, granularity=granularity)


def export_ltr(
    lists: Mapping[str, SuspiciousnessList],
    truth_ids: AbstractSet[str],
    techniques: tuple[str, ...] | None = None,
) -> str:
    """CSV feature table for an external learning-to-rank combiner.

    One row per entity in the union of the members' lists: the entity id,
    one normalized-score column per technique (0 when the technique does
    not list the entity), and the faulty label.
    """
    columns = tuple(techniques) if techniques is not None else tuple(sorted(lists))
    normalized = {t: normalize_scores(lists[t]).scores() for t in columns if t in lists}
    union: set[str] = set()
    for scores in normalized.values():
        union.update(scores)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["entity", *columns, "faulty"])
    for eid in sorted(union):
        row = [eid]
        for technique in columns:
            row.append(format(normalized.get(technique, {}).get(eid, 0.0), ".12g"))
        row.append("1" if eid in truth_ids else "0")
        writer.writerow(row)
    return buffer.getvalue()
