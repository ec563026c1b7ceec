"""Fault-localization engine: suspiciousness rankings from dynamic
evidence, tie-aware rank metrics, and technique fusion."""

from .errors import (
    DegenerateStatisticError,
    EmptyGroundTruthError,
    FaultrankError,
    GranularityMismatchError,
    InconsistentCountsError,
    IngestError,
    TechniqueUnavailableError,
    UnknownEntityError,
)
from .fusion import FusionConfig, avgfl_rank, export_ltr, normalize_scores
from .ground_truth import (
    BugKind,
    Edit,
    EditScript,
    GroundTruth,
    classify_bug,
    derive_ground_truth,
)
from .mbfl import MuseGlobals, MutantKillCounts, mbfl_rank, metallaxis_mutant, muse_mutant
from .metrics import (
    aggregate_granularity,
    at_n,
    e_inspect,
    exam_score,
    generalized_e_inspect,
)
from .model import (
    CoverageCounts,
    CoverageSpectrum,
    KillMatrix,
    Location,
    MutantRecord,
    PredicateTrial,
    ProgramModel,
    Scope,
    StackTrace,
    TestEvidence,
    TestOutcome,
    coverage_counts,
    validate_evidence,
)
from .ranking import SuspiciousnessList, ranked
from .reachability import CriticalPredicate, critical_predicates, ps_rank, st_rank
from .sbfl import SbflFormula, sbfl_rank, sbfl_score
from .stats import PairedVectors, cliffs_delta, kendall_tau, wilcoxon_signed_rank
from .wire import dump_bundle, load_bundle

__version__ = "0.1.0"
