"""Tie-aware rank metrics over suspiciousness lists.

The expected-inspection rank of an entity inside a tie block of size
`ties` containing `faulty` faulty members starting at position `start` is

    start + sum_{k=1}^{ties-faulty} k * C(ties-k-1, faulty-1) / C(ties, faulty)

which averages the position of the first faulty member over all shuffles
of the block. Binomials are accumulated exactly over rationals and only
converted to float at the end: the generalized variant creates tie blocks
of thousands of entities, where naive float accumulation cancels badly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import AbstractSet, Optional

from .errors import GranularityMismatchError
from .model import ProgramModel
from .ranking import SuspiciousnessList, ranked

AT_N_DEFAULTS = (1, 3, 5, 10)


def expected_rank_in_block(start: int, ties: int, faulty: int) -> Fraction:
    """Exact expected inspection rank for one tie block.

    A block with no faulty member keeps its start position (empty sum),
    matching the per-entity convention for non-faulty rows.
    """
    if start < 1 or ties < 1 or faulty < 0 or faulty > ties:
        raise ValueError(f"bad tie block start={start} ties={ties} faulty={faulty}")
    total = Fraction(start)
    if faulty == 0:
        return total
    denominator = comb(ties, faulty)
    for k in range(1, ties - faulty + 1):
        total += Fraction(k * comb(ties - k - 1, faulty - 1), denominator)
    return total


def e_inspect(slist: SuspiciousnessList, truth_ids: AbstractSet[str]) -> Optional[float]:
    """Expected rank of the first faulty entity; None when none appears.

    Only the tie structure matters, never the score values themselves.
    """
    best: Optional[Fraction] = None
    for start, members in slist.tie_blocks():
        faulty = sum(1 for eid in members if eid in truth_ids)
        if faulty == 0:
            continue
        value = expected_rank_in_block(start, len(members), faulty)
        if best is None or value < best:
            best = value
    return float(best) if best is not None else None


def generalized_e_inspect(
    slist: SuspiciousnessList,
    truth_ids: AbstractSet[str],
    program: ProgramModel,
) -> float:
    """Equals e_inspect when the list localizes the bug; otherwise ranks the
    list extended by all unreported program entities as one trailing tie
    block. Defined for every list, and smaller for shorter lists when
    neither localizes.
    """
    localized = e_inspect(slist, truth_ids)
    if localized is not None:
        return localized
    listed = set(slist.entity_ids)
    absent = program.entity_ids(slist.granularity) - listed
    faulty_absent = sum(1 for eid in absent if eid in truth_ids)
    if faulty_absent == 0:
        raise ValueError("ground truth has no entity in the program model at this granularity")
    block = expected_rank_in_block(len(listed) + 1, len(absent), faulty_absent)
    return float(block)


def exam_score(e_inspect_rank: Optional[float], entity_count: int) -> Optional[float]:
    """Rank as a fraction of the program's entity count at this granularity."""
    if e_inspect_rank is None:
        return None
    if entity_count < 1:
        raise ValueError("entity count must be positive")
    return e_inspect_rank / entity_count


def at_n(e_inspect_rank: Optional[float], n: int) -> bool:
    """Whether the first faulty entity ranks within the top n positions."""
    if n < 1:
        raise ValueError("n must be positive")
    return e_inspect_rank is not None and e_inspect_rank <= n


def aggregate_granularity(
    slist: SuspiciousnessList,
    program: ProgramModel,
    target: str,
) -> SuspiciousnessList:
    """Coarsen a statement-level list: each scope scores the max over its
    listed statements; scopes with no listed statement are omitted.
    """
    if slist.granularity != "statement":
        raise GranularityMismatchError(
            f"can only aggregate statement-level lists, got {slist.granularity!r}")
    if target not in ("function", "module"):
        raise ValueError(f"aggregation target must be function or module, got {target!r}")
    scores: dict[str, float] = {}
    for eid, score in slist:
        unit = program.unit_id(program.location(eid), target)
        if unit not in scores or score > scores[unit]:
            scores[unit] = score
    return ranked(scores, granularity=target)


@dataclass(frozen=True)
class EvaluationRecord:
    """Per-(bug, technique, granularity) effectiveness measurements."""

    e_inspect: Optional[float]
    generalized_e_inspect: float
    exam_score: Optional[float]
    at_n: dict[int, bool]
    list_length: int
    wall_clock_s: float


def evaluate_list(
    slist: SuspiciousnessList,
    truth_ids: AbstractSet[str],
    program: ProgramModel,
    wall_clock_s: float = 0.0,
    ns: tuple[int, ...] = AT_N_DEFAULTS,
) -> EvaluationRecord:
    rank = e_inspect(slist, truth_ids)
    return EvaluationRecord(
        e_inspect=rank,
        generalized_e_inspect=generalized_e_inspect(slist, truth_ids, program),
        exam_score=exam_score(rank, program.entity_count(slist.granularity)),
        at_n={n: at_n(rank, n) for n in ns},
        list_length=len(slist),
        wall_clock_s=wall_clock_s,
    )
