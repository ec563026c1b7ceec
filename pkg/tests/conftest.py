"""Shared fixtures: the golden toy bundle and the edit-script example program."""

from __future__ import annotations

import pytest

from faultrank.model import (
    CoverageSpectrum,
    KillMatrix,
    Location,
    MutantRecord,
    ProgramModel,
    Scope,
    StackTrace,
    TestEvidence,
    TestOutcome,
)


def program_of(locations, scopes, counts=None):
    return ProgramModel(
        locations=tuple(locations),
        scopes=tuple(scopes),
        entity_count_by_granularity=counts or {},
    )


@pytest.fixture
def golden_program():
    """One module, one function, five statements."""
    scopes = [
        Scope("app::<module>", "module", "app.py"),
        Scope("app::main", "function", "app.py", parent="app::<module>"),
    ]
    locations = [
        Location("app.py", 1, "plain", "app::<module>"),
        Location("app.py", 2, "plain", "app::main"),
        Location("app.py", 3, "branching-predicate", "app::main"),
        Location("app.py", 4, "plain", "app::main"),
        Location("app.py", 5, "plain", "app::main"),
    ]
    return program_of(locations, scopes, {"statement": 5, "function": 2, "module": 1})


@pytest.fixture
def golden_bundle(golden_program):
    """2 failing / 3 passing tests with hand-checked coverage:

        app.py:1  covered by every test
        app.py:2  covered by f1, p1, p2   (F+=1, P+=2)
        app.py:3  covered by f1, f2       (F+=2, P+=0)
        app.py:4  covered by f2, p3       (F+=1, P+=1)
        app.py:5  covered by no test
    """
    outcomes = (
        TestOutcome("f1", "fail", crashed=True),
        TestOutcome("f2", "fail"),
        TestOutcome("p1", "pass"),
        TestOutcome("p2", "pass"),
        TestOutcome("p3", "pass"),
    )
    per_test = {
        "f1": frozenset({"app.py:1", "app.py:2", "app.py:3"}),
        "f2": frozenset({"app.py:1", "app.py:3", "app.py:4"}),
        "p1": frozenset({"app.py:1", "app.py:2"}),
        "p2": frozenset({"app.py:1", "app.py:2"}),
        "p3": frozenset({"app.py:1", "app.py:4"}),
    }
    loc = {l.entity_id: l for l in golden_program.locations}
    mutants = (
        MutantRecord("m1", loc["app.py:2"], {"f1": "fail-to-pass", "p1": "pass-to-fail"}),
        MutantRecord("m2", loc["app.py:3"], {"f1": "fail-different-trace", "f2": "fail-to-pass"}),
        MutantRecord("m3", loc["app.py:3"], {"p3": "pass-to-fail"}),
    )
    traces = (
        StackTrace("f1", ("app::main",)),
    )
    return TestEvidence(
        program=golden_program,
        outcomes=outcomes,
        spectrum=CoverageSpectrum(per_test=per_test),
        kill_matrix=KillMatrix(mutants=mutants),
        predicate_trials=(),
        stack_traces=traces,
    )


@pytest.fixture
def fig_example_program():
    """The worked edit-script example: two adds, one modify, one remove.

        1  a = 3            module
        2  c = 5            module
        3  def foo(y):      module
        4    if y > 3:      foo   (branching predicate)
        5    a = y          foo
        6    y = y * 2      foo
        7  def bar(z):      module
        8    z = z + 2      bar
        9    return z       bar
    """
    scopes = [
        Scope("fig::<module>", "module", "fig.py"),
        Scope("fig::foo", "function", "fig.py", parent="fig::<module>"),
        Scope("fig::bar", "function", "fig.py", parent="fig::<module>"),
    ]
    locations = [
        Location("fig.py", 1, "plain", "fig::<module>"),
        Location("fig.py", 2, "plain", "fig::<module>"),
        Location("fig.py", 3, "plain", "fig::<module>"),
        Location("fig.py", 4, "branching-predicate", "fig::foo"),
        Location("fig.py", 5, "plain", "fig::foo"),
        Location("fig.py", 6, "plain", "fig::foo"),
        Location("fig.py", 7, "plain", "fig::<module>"),
        Location("fig.py", 8, "plain", "fig::bar"),
        Location("fig.py", 9, "plain", "fig::bar"),
    ]
    return program_of(locations, scopes, {"statement": 9})


@pytest.fixture
def aggregation_program():
    """2 modules / 3 functions / 8 statements for granularity aggregation."""
    scopes = [
        Scope("u::<module>", "module", "u.py"),
        Scope("u::g1", "function", "u.py", parent="u::<module>"),
        Scope("u::g2", "function", "u.py", parent="u::<module>"),
        Scope("v::<module>", "module", "v.py"),
        Scope("v::h1", "function", "v.py", parent="v::<module>"),
    ]
    locations = [
        Location("u.py", 1, "plain", "u::g1"),
        Location("u.py", 2, "plain", "u::g1"),
        Location("u.py", 3, "plain", "u::g2"),
        Location("u.py", 4, "branching-predicate", "u::g2"),
        Location("u.py", 5, "plain", "u::g2"),
        Location("v.py", 1, "plain", "v::h1"),
        Location("v.py", 2, "plain", "v::h1"),
        Location("v.py", 3, "plain", "v::<module>"),
    ]
    return program_of(locations, scopes)
