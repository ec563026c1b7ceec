import random

import pytest

from faultrank.errors import EmptyGroundTruthError, UnknownEntityError
from faultrank.ground_truth import (
    Edit,
    EditScript,
    classify_bug,
    derive_ground_truth,
)
from faultrank.model import (
    CoverageSpectrum,
    KillMatrix,
    Location,
    MutantRecord,
    ProgramModel,
    Scope,
    TestEvidence,
    TestOutcome,
)

from conftest import program_of

FIG_EDITS = EditScript(edits=(
    Edit(kind="add", module_path="fig.py", insertion_gap=(1, 2)),
    Edit(kind="modify", module_path="fig.py", faulty_version_line=4),
    Edit(kind="add", module_path="fig.py", insertion_gap=(6, 7)),
    Edit(kind="remove", module_path="fig.py", faulty_version_line=8),
))


def truth_lines(truth):
    return {loc.line for loc in truth.faulty_locations}


class TestDerive:
    def test_worked_example(self, fig_example_program):
        truth = derive_ground_truth(FIG_EDITS, fig_example_program)
        assert truth_lines(truth) == {1, 2, 4, 6, 8}
        assert 7 not in truth_lines(truth)  # next function's def line is out of scope
        assert truth.contains_predicate  # line 4 is the if condition

    def test_single_modify(self, fig_example_program):
        script = EditScript(edits=(Edit("modify", "fig.py", faulty_version_line=5),))
        truth = derive_ground_truth(script, fig_example_program)
        assert truth_lines(truth) == {5}
        assert not truth.contains_predicate

    def test_add_at_module_start_keeps_only_the_follower(self):
        scopes = [Scope("s::<module>", "module", "s.py")]
        locations = [
            Location("s.py", 2, "plain", "s::<module>"),
            Location("s.py", 3, "plain", "s::<module>"),
            Location("s.py", 5, "plain", "s::<module>"),
        ]
        program = program_of(locations, scopes)
        script = EditScript(edits=(Edit("add", "s.py", insertion_gap=(None, 1)),))
        truth = derive_ground_truth(script, program)
        assert truth_lines(truth) == {2}

    def test_gap_lines_may_be_blank(self):
        # a gap pointing at blank lines still finds the nearest real statements
        scopes = [Scope("s::<module>", "module", "s.py")]
        locations = [
            Location("s.py", 1, "plain", "s::<module>"),
            Location("s.py", 4, "plain", "s::<module>"),  # lines 2-3 are blank
        ]
        program = program_of(locations, scopes)
        script = EditScript(edits=(Edit("add", "s.py", insertion_gap=(2, 3)),))
        truth = derive_ground_truth(script, program)
        assert truth_lines(truth) == {1, 4}

    def test_add_neighbors_share_the_inferred_scope(self, fig_example_program):
        script = EditScript(edits=(Edit("add", "fig.py", insertion_gap=(5, 6)),))
        truth = derive_ground_truth(script, fig_example_program)
        scopes = {loc.scope_id for loc in truth.faulty_locations}
        assert scopes == {"fig::foo"}

    def test_order_independent_and_idempotent(self, fig_example_program):
        reordered = EditScript(edits=tuple(reversed(FIG_EDITS.edits)))
        doubled = EditScript(edits=FIG_EDITS.edits + FIG_EDITS.edits)
        baseline = derive_ground_truth(FIG_EDITS, fig_example_program)
        assert derive_ground_truth(reordered, fig_example_program) == baseline
        assert derive_ground_truth(doubled, fig_example_program) == baseline

    def test_unknown_line_is_a_domain_error(self, fig_example_program):
        script = EditScript(edits=(Edit("modify", "fig.py", faulty_version_line=99),))
        with pytest.raises(UnknownEntityError):
            derive_ground_truth(script, fig_example_program)

    def test_empty_result_is_an_error(self, fig_example_program):
        # an add into a module with no locations derives nothing
        script = EditScript(edits=(Edit("add", "other.py", insertion_gap=(1, 2)),))
        with pytest.raises(EmptyGroundTruthError):
            derive_ground_truth(script, fig_example_program)

    def test_every_faulty_location_is_in_the_program(self, fig_example_program):
        rng = random.Random(5)
        lines = [loc.line for loc in fig_example_program.locations]
        for _ in range(50):
            edits = []
            for _ in range(rng.randint(1, 3)):
                if rng.random() < 0.5:
                    edits.append(Edit("modify", "fig.py", faulty_version_line=rng.choice(lines)))
                else:
                    gap_line = rng.randint(1, 9)
                    edits.append(Edit("add", "fig.py", insertion_gap=(gap_line, gap_line + 1)))
            truth = derive_ground_truth(EditScript(edits=tuple(edits)), fig_example_program)
            assert truth.faulty_locations <= set(fig_example_program.locations)

    def test_projections_follow_the_unit_mapping(self, fig_example_program):
        truth = derive_ground_truth(FIG_EDITS, fig_example_program)
        assert truth.truth_ids("statement") == {
            "fig.py:1", "fig.py:2", "fig.py:4", "fig.py:6", "fig.py:8"}
        assert truth.truth_ids("function") == {"fig::<module>", "fig::foo", "fig::bar"}
        assert truth.truth_ids("module") == {"fig::<module>"}


def evidence_with(program, crashed, mutant_eids=()):
    outcomes = (
        TestOutcome("f1", "fail", crashed=crashed),
        TestOutcome("p1", "pass"),
    )
    matrix = None
    if mutant_eids:
        matrix = KillMatrix(mutants=tuple(
            MutantRecord(f"m{i}", program.location(eid), {})
            for i, eid in enumerate(mutant_eids)
        ))
    return TestEvidence(
        program=program,
        outcomes=outcomes,
        spectrum=CoverageSpectrum(per_test={}),
        kill_matrix=matrix,
    )


class TestClassify:
    def test_crashing_predicate_without_mutants(self, fig_example_program):
        script = EditScript(edits=(Edit("modify", "fig.py", faulty_version_line=4),))
        truth = derive_ground_truth(script, fig_example_program)
        kind = classify_bug(truth, evidence_with(fig_example_program, crashed=True))
        assert kind.crashing and kind.predicate
        assert kind.mutability == 0.0 and not kind.mutable

    def test_assertion_failure_is_not_crashing(self, fig_example_program):
        script = EditScript(edits=(Edit("modify", "fig.py", faulty_version_line=5),))
        truth = derive_ground_truth(script, fig_example_program)
        kind = classify_bug(truth, evidence_with(fig_example_program, crashed=False))
        assert not kind.crashing and not kind.predicate

    def test_mutability_percentage(self):
        # 461 mutants, 23 on truth lines -> 4.99%
        scopes = [Scope("m::<module>", "module", "m.py")]
        locations = [Location("m.py", i, "plain", "m::<module>") for i in range(1, 3)]
        program = program_of(locations, scopes)
        script = EditScript(edits=(Edit("modify", "m.py", faulty_version_line=1),))
        truth = derive_ground_truth(script, program)
        mutants = ["m.py:1"] * 23 + ["m.py:2"] * (461 - 23)
        kind = classify_bug(truth, evidence_with(program, False, mutants))
        assert kind.mutability == pytest.approx(100 * 23 / 461)
        assert round(kind.mutability, 2) == 4.99
        assert kind.mutable
