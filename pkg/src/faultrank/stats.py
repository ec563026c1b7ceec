"""Pairwise comparison statistics over per-bug metric vectors.

Kendall's tau-b and Cliff's delta come with the qualitative bands used to
interpret them; the Wilcoxon p-value is reported for conformance with
standard practice (the normal approximation with Pratt zero handling is
accurate enough for that purpose).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import wilcoxon as _scipy_wilcoxon

from .errors import DegenerateStatisticError

TAU_BANDS = ("negligible", "weak", "medium", "strong")
DELTA_BANDS = ("negligible", "small", "medium", "large")


@dataclass(frozen=True)
class PairedVectors:
    """Two metric vectors over the same bugs, in the same bug order."""

    bug_ids: tuple[str, ...]
    values_a: tuple[float, ...]
    values_b: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.bug_ids) == len(self.values_a) == len(self.values_b)):
            raise ValueError("paired vectors must align with the bug ids")
        if len(self.bug_ids) < 1:
            raise ValueError("paired vectors must be nonempty")

    def __len__(self) -> int:
        return len(self.bug_ids)

    def swapped(self) -> "PairedVectors":
        return PairedVectors(self.bug_ids, self.values_b, self.values_a)


@dataclass(frozen=True)
class TauResult:
    tau: float
    band: str


@dataclass(frozen=True)
class DeltaResult:
    delta: float
    band: str


def tau_band(tau: float) -> str:
    magnitude = abs(tau)
    if magnitude <= 0.3:
        return "negligible"
    if magnitude <= 0.5:
        return "weak"
    if magnitude <= 0.7:
        return "medium"
    return "strong"


def delta_band(delta: float) -> str:
    magnitude = abs(delta)
    if magnitude < 0.147:
        return "negligible"
    if magnitude < 0.33:
        return "small"
    if magnitude < 0.474:
        return "medium"
    return "large"


def kendall_tau(pair: PairedVectors) -> TauResult:
    """Tie-corrected tau-b via exact integer pair counting."""
    n = len(pair)
    if n < 2:
        raise ValueError("kendall tau needs at least two pairs")
    a, b = pair.values_a, pair.values_b
    concordant = discordant = ties_a = ties_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = (a[i] > a[j]) - (a[i] < a[j])
            db = (b[i] > b[j]) - (b[i] < b[j])
            if da == 0:
                ties_a += 1
            if db == 0:
                ties_b += 1
            if da * db > 0:
                concordant += 1
            elif da * db < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    if n0 == ties_a or n0 == ties_b:
        raise DegenerateStatisticError("tau undefined: a vector has zero variance")
    tau = (concordant - discordant) / math.sqrt((n0 - ties_a) * (n0 - ties_b))
    return TauResult(tau=tau, band=tau_band(tau))


def wilcoxon_signed_rank(pair: PairedVectors) -> float:
    """Two-sided p-value, normal approximation with tie and continuity
    corrections and Pratt handling of zero differences.
    """
    if len(pair) < 5:
        raise ValueError("wilcoxon needs at least five pairs for the normal approximation")
    a = np.asarray(pair.values_a, dtype=float)
    b = np.asarray(pair.values_b, dtype=float)
    if np.all(a == b):
        raise DegenerateStatisticError("wilcoxon undefined: all differences are zero")
    result = _scipy_wilcoxon(a, b, zero_method="pratt", correction=True, method="approx")
    return float(result.pvalue)


def cliffs_delta(pair: PairedVectors) -> DeltaResult:
    """How often values in a exceed those in b, over all cross pairs."""
    a = np.asarray(pair.values_a, dtype=float)
    b = np.asarray(pair.values_b, dtype=float)
    comparisons = np.sign(a[:, None] - b[None, :])
    delta = float(comparisons.sum()) / (len(a) * len(b))
    return DeltaResult(delta=delta, band=delta_band(delta))
