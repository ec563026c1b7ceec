"""Suspiciousness lists: ordered (entity, score) pairs at one granularity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .model import GRANULARITIES


@dataclass(frozen=True)
class SuspiciousnessList:
    """Entities ordered by nonincreasing score; entities unique.

    Entity keys are "path:line" strings at statement granularity and
    scope ids at function/module granularity.
    """

    granularity: str = "statement"
    entries: tuple[tuple[str, float], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        seen: set[str] = set()
        previous = math.inf
        for eid, score in self.entries:
            if math.isnan(score):
                raise ValueError(f"NaN score for {eid!r}")
            if score > previous:
                raise ValueError(f"scores increase at {eid!r}")
            if eid in seen:
                raise ValueError(f"duplicate entity {eid!r}")
            seen.add(eid)
            previous = score

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, float]]:
        return iter(self.entries)

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(eid for eid, _ in self.entries)

    def scores(self) -> dict[str, float]:
        return dict(self.entries)

    def tie_blocks(self) -> Iterator[tuple[int, tuple[str, ...]]]:
        """Yield (1-based start rank, members) for each run of equal scores."""
        start = 1
        block: list[str] = []
        block_score: float | None = None
        for eid, score in self.entries:
            if block and score != block_score:
                yield start, tuple(block)
                start += len(block)
                block = []
            block.append(eid)
            block_score = score
        if block:
            yield start, tuple(block)


def ranked(scores: Mapping[str, float], granularity: str = "statement") -> SuspiciousnessList:
    """Sort by decreasing score; ties ordered by entity id for determinism."""
    entries = tuple(sorted(scores.items(), key=lambda kv: (-kv[1], kv[0])))
    return SuspiciousnessList(granularity=granularity, entries=entries)


def argsort_key(slist: SuspiciousnessList) -> tuple[tuple[str, ...], ...]:
    """Order signature: the sequence of tie blocks, each as a sorted entity tuple.

    Two lists with the same signature rank identically (tie structure included).
    """
    return tuple(tuple(sorted(members)) for _, members in slist.tie_blocks())


def merge_max(score_maps: Iterable[Mapping[str, float]]) -> dict[str, float]:
    out: dict[str, float] = {}
    for scores in score_maps:
        for eid, score in scores.items():
            if eid not in out or score > out[eid]:
                out[eid] = score
    return out
