#!/usr/bin/env python3
"""Generate the bundled 5-bug synthetic corpus under corpus/synthetic/.

Deterministic for a fixed seed; every emitted bundle passes
validate_evidence and derives a nonempty ground truth. The bugs are
shaped to exercise the harness paths: crashing and non-crashing bugs,
predicate bugs, a bug without a kill matrix (MBFL unavailable), a bug
without stack traces (ST unavailable), and an empty predicate-trials
file (PS runs and returns an empty list).
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

from faultrank.ground_truth import Edit, EditScript, derive_ground_truth
from faultrank.model import (
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
    validate_evidence,
)
from faultrank.wire import dump_bundle

SEED = 20240601


def build_module(path: str, n_funcs: int, body_lines: int, rng: random.Random,
                 start_line: int = 1) -> tuple[list[Location], list[Scope], dict[str, list[str]]]:
    """One module: a couple of top-level statements, then functions with
    bodies that include one branching predicate each.
    """
    module_scope = f"{path}::<module>"
    scopes = [Scope(scope_id=module_scope, level="module", module_path=path)]
    locations: list[Location] = []
    per_func: dict[str, list[str]] = {module_scope: []}

    line = start_line
    for _ in range(2):  # top-level constants
        locations.append(Location(path, line, "plain", module_scope))
        per_func[module_scope].append(f"{path}:{line}")
        line += rng.choice([1, 2])

    for idx in range(n_funcs):
        func_scope = f"{path}::f{idx}"
        scopes.append(Scope(scope_id=func_scope, level="function",
                            module_path=path, parent=module_scope))
        locations.append(Location(path, line, "plain", module_scope))  # def line
        per_func[module_scope].append(f"{path}:{line}")
        line += 1
        per_func[func_scope] = []
        for body_idx in range(body_lines):
            kind = "branching-predicate" if body_idx == 1 else "plain"
            locations.append(Location(path, line, kind, func_scope))
            per_func[func_scope].append(f"{path}:{line}")
            line += rng.choice([1, 1, 2])
        line += rng.choice([1, 2])
    return locations, scopes, per_func


def make_bug(bug_id: str, category: str, rng: random.Random, *,
             crashing: bool, with_mutants: bool, with_traces: bool,
             empty_trials: bool, truth_on_predicate: bool,
             mutants_on_truth: int) -> tuple[TestEvidence, EditScript, dict]:
    mod_a, scopes_a, funcs_a = build_module(f"{bug_id}/alpha.py", 3, 4, rng)
    mod_b, scopes_b, funcs_b = build_module(f"{bug_id}/beta.py", 2, 3, rng)
    locations = tuple(mod_a + mod_b)
    scopes = tuple(scopes_a + scopes_b)
    program = ProgramModel(locations=locations, scopes=scopes)
    program = ProgramModel(
        locations=locations,
        scopes=scopes,
        entity_count_by_granularity={
            "statement": len(locations),
            "function": len(program.entity_ids("function")),
            "module": len(program.entity_ids("module")),
        },
    )
    per_scope = {**funcs_a, **funcs_b}
    function_scopes = [s.scope_id for s in scopes if s.level == "function"]

    n_failing = rng.choice([1, 2])
    n_passing = rng.randint(3, 5)
    outcomes = []
    for i in range(n_failing):
        outcomes.append(TestOutcome(f"t_fail_{i}", "fail", crashed=crashing and i == 0))
    for i in range(n_passing):
        outcomes.append(TestOutcome(f"t_pass_{i}", "pass"))

    # each test executes both modules' top-level lines plus a few functions
    module_scopes = [s.scope_id for s in scopes if s.level == "module"]
    top_level = [eid for scope in module_scopes for eid in per_scope[scope]]
    target_scope = rng.choice([s for s in function_scopes if s.startswith(f"{bug_id}/alpha")])

    per_test: dict[str, frozenset[str]] = {}
    for outcome in outcomes:
        executed = set(top_level)
        chosen = rng.sample(function_scopes, k=rng.randint(1, 3))
        if outcome.outcome == "fail" and target_scope not in chosen:
            chosen.append(target_scope)
        for scope_id in chosen:
            executed.update(per_scope[scope_id])
        per_test[outcome.test_id] = frozenset(executed)

    # ground truth: a modify inside the failing-covered target function
    target_lines = per_scope[target_scope]
    if truth_on_predicate:
        truth_eid = target_lines[1]  # the branching predicate of the body
    else:
        truth_eid = rng.choice([target_lines[0], target_lines[2]])
    truth_line = int(truth_eid.rsplit(":", 1)[1])
    edits = [Edit(kind="modify", module_path=f"{bug_id}/alpha.py", faulty_version_line=truth_line)]
    if rng.random() < 0.5:
        neighbour = int(target_lines[2].rsplit(":", 1)[1])
        edits.append(Edit(kind="add", module_path=f"{bug_id}/alpha.py",
                          insertion_gap=(neighbour, neighbour + 1)))
    script = EditScript(edits=tuple(edits))

    failing_ids = frozenset(o.test_id for o in outcomes if o.outcome == "fail")
    passing_ids = frozenset(o.test_id for o in outcomes if o.outcome == "pass")
    failing_covered = sorted(set().union(*(per_test[t] for t in failing_ids)))

    kill_matrix = None
    if with_mutants:
        mutants = []
        target_pool = [eid for eid in failing_covered if eid != truth_eid]
        mutated = rng.sample(target_pool, k=min(5, len(target_pool)))
        mutated += [truth_eid] * mutants_on_truth
        for m_idx, eid in enumerate(sorted(mutated)):
            relations = {}
            for tid in sorted(failing_ids):
                relations[tid] = rng.choice(["same", "fail-to-pass", "fail-different-trace"])
            for tid in sorted(passing_ids):
                if rng.random() < 0.3:
                    relations[tid] = "pass-to-fail"
            relations = {t: r for t, r in relations.items() if r != "same"}
            path, _, line = eid.rpartition(":")
            mutants.append(MutantRecord(
                mutant_id=f"m{m_idx}",
                mutated_location=program.location(eid),
                relations=relations,
            ))
        kill_matrix = KillMatrix(mutants=tuple(mutants))

    trials = ()
    if not empty_trials:
        predicate_eids = [
            eid for eid in failing_covered
            if program.location(eid).kind == "branching-predicate"
        ]
        records = []
        for p_idx, eid in enumerate(sorted(predicate_eids)[:3]):
            for tid in sorted(failing_ids):
                passes = rng.random() < 0.6
                records.append(PredicateTrial(
                    test_id=tid,
                    predicate_location=program.location(eid),
                    evaluation_index=rng.randint(0, 2),
                    result="passes" if passes else "still-fails",
                    remaining_critical_count=p_idx if passes else 0,
                ))
        trials = tuple(records)

    stack_traces = None
    if with_traces:
        records = []
        for tid in sorted(failing_ids):
            frames = [target_scope]
            frames += rng.sample([s for s in function_scopes if s != target_scope], k=1)
            frames.append("site-packages/lib.py::helper")  # unknown, skipped by ST
            records.append(StackTrace(test_id=tid, frames=tuple(frames)))
        stack_traces = tuple(records)

    evidence = TestEvidence(
        program=program,
        outcomes=tuple(outcomes),
        spectrum=CoverageSpectrum(per_test=per_test),
        kill_matrix=kill_matrix,
        predicate_trials=trials,
        stack_traces=stack_traces,
    )
    meta = {"bug_id": bug_id, "project": "synth", "category": category}
    return evidence, script, meta


BUG_SPECS = [
    ("bug_001", "ds", dict(crashing=True, with_mutants=True, with_traces=True,
                           empty_trials=False, truth_on_predicate=False, mutants_on_truth=2)),
    ("bug_002", "cl", dict(crashing=False, with_mutants=True, with_traces=True,
                           empty_trials=False, truth_on_predicate=True, mutants_on_truth=1)),
    ("bug_003", "web", dict(crashing=False, with_mutants=True, with_traces=True,
                            empty_trials=True, truth_on_predicate=False, mutants_on_truth=0)),
    ("bug_004", "dev", dict(crashing=True, with_mutants=False, with_traces=True,
                            empty_trials=False, truth_on_predicate=False, mutants_on_truth=0)),
    ("bug_005", "ds", dict(crashing=True, with_mutants=True, with_traces=False,
                           empty_trials=False, truth_on_predicate=False, mutants_on_truth=1)),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus" / "synthetic"))
    parser.add_argument("--seed", type=int, default=SEED)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out_root = Path(args.out)
    for bug_id, category, options in BUG_SPECS:
        evidence, script, meta = make_bug(bug_id, category, rng, **options)
        violations = validate_evidence(evidence)
        assert not violations, f"{bug_id}: {violations}"
        truth = derive_ground_truth(script, evidence.program)
        assert truth.faulty_locations, bug_id
        dump_bundle(out_root / bug_id, evidence, edits=script, meta=meta)
        print(f"{bug_id}: {len(evidence.program.locations)} locations, "
              f"{len(evidence.outcomes)} tests, truth={sorted(l.entity_id for l in truth.faulty_locations)}")


if __name__ == "__main__":
    main()
