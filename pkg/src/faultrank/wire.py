"""Bundle wire format: one directory per bug, JSON + JSONL files.

Layout:
    program.json            locations, scopes, entity_count_by_granularity
    tests.json              {"outcomes": [{test_id, outcome, crashed}]}
    coverage.jsonl          per test: {"test_id", "covered": ["path:line", ...]}
    mutants.jsonl           per mutant: {"mutant_id", "mutated_location", "relations"}
    predicate_trials.jsonl  per trial: {"test_id", "predicate_location",
                            "evaluation_index", "result", "remaining_critical_count"}
    stack_traces.jsonl      per failing test: {"test_id", "frames"}
    edits.json              {"edits": [{kind, module_path, ...}]}
    meta.json               optional {"bug_id", "project", "category"}

Optional files may be absent (the technique needing them reports
unavailable). Unknown fields are ignored. All files are UTF-8.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .errors import IngestError
from .ground_truth import Edit, EditScript
from .model import (
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
    split_entity_id,
)

PROGRAM_FILE = "program.json"
TESTS_FILE = "tests.json"
COVERAGE_FILE = "coverage.jsonl"
MUTANTS_FILE = "mutants.jsonl"
TRIALS_FILE = "predicate_trials.jsonl"
TRACES_FILE = "stack_traces.jsonl"
EDITS_FILE = "edits.json"
META_FILE = "meta.json"


@dataclass(frozen=True)
class LoadedBug:
    bug_id: str
    evidence: TestEvidence
    edits: Optional[EditScript]
    meta: dict


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc}", path=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from exc


def _read_jsonl(path: Path) -> list[Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc}", path=str(path)) from exc
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            records.append(json.loads(raw))
        except json.JSONDecodeError as exc:
            raise IngestError(f"invalid JSON record: {exc.msg}", path=str(path), line=lineno) from exc
    return records


def _require(record: dict, key: str, path: Path, line: int | None = None) -> Any:
    if key not in record:
        raise IngestError(f"missing field {key!r}", path=str(path), line=line)
    return record[key]


def _parse_location_ref(value: Any, program: ProgramModel, path: Path, line: int | None) -> Location:
    """A location reference is a "path:line" string; resolved against the model.

    Unknown references parse into a placeholder so validate_evidence can
    report them instead of aborting the whole ingest.
    """
    if isinstance(value, str):
        try:
            module_path, lineno = split_entity_id(value)
        except ValueError:
            raise IngestError(f"bad location reference {value!r}", path=str(path), line=line) from None
    elif isinstance(value, dict):
        module_path = _require(value, "module_path", path, line)
        lineno = int(_require(value, "line", path, line))
    else:
        raise IngestError(f"bad location reference {value!r}", path=str(path), line=line)
    eid = f"{module_path}:{lineno}"
    if program.has_location(eid):
        return program.location(eid)
    return Location(module_path=module_path, line=lineno)


def load_program(path: Path) -> ProgramModel:
    data = _read_json(path)
    locations = []
    for rec in _require(data, "locations", path):
        locations.append(Location(
            module_path=_require(rec, "module_path", path),
            line=int(_require(rec, "line", path)),
            kind=rec.get("kind", "plain"),
            scope_id=_require(rec, "scope_id", path),
        ))
    scopes = []
    for rec in _require(data, "scopes", path):
        scopes.append(Scope(
            scope_id=_require(rec, "scope_id", path),
            level=_require(rec, "level", path),
            module_path=_require(rec, "module_path", path),
            parent=rec.get("parent"),
        ))
    counts = {str(k): int(v) for k, v in data.get("entity_count_by_granularity", {}).items()}
    return ProgramModel(
        locations=tuple(locations),
        scopes=tuple(scopes),
        entity_count_by_granularity=counts,
    )


def load_edits(path: Path) -> EditScript:
    data = _read_json(path)
    edits = []
    for rec in _require(data, "edits", path):
        kind = _require(rec, "kind", path)
        gap = rec.get("insertion_gap")
        try:
            edits.append(Edit(
                kind=kind,
                module_path=_require(rec, "module_path", path),
                faulty_version_line=rec.get("faulty_version_line"),
                insertion_gap=tuple(gap) if gap is not None else None,
            ))
        except ValueError as exc:
            raise IngestError(f"bad edit record: {exc}", path=str(path)) from exc
    return EditScript(edits=tuple(edits))


def load_bundle(bundle_dir: str | Path) -> LoadedBug:
    """Parse one bug directory into an evidence bundle.

    Schema problems raise IngestError; referential problems surface later
    through validate_evidence.
    """
    root = Path(bundle_dir)
    program = load_program(root / PROGRAM_FILE)

    tests_path = root / TESTS_FILE
    outcomes = []
    for rec in _require(_read_json(tests_path), "outcomes", tests_path):
        outcomes.append(TestOutcome(
            test_id=_require(rec, "test_id", tests_path),
            outcome=_require(rec, "outcome", tests_path),
            crashed=bool(rec.get("crashed", False)),
        ))

    coverage_path = root / COVERAGE_FILE
    per_test: dict[str, frozenset[str]] = {}
    for lineno, rec in enumerate(_read_jsonl(coverage_path), start=1):
        test_id = _require(rec, "test_id", coverage_path, lineno)
        covered = _require(rec, "covered", coverage_path, lineno)
        per_test[test_id] = frozenset(str(c) for c in covered)

    kill_matrix = None
    mutants_path = root / MUTANTS_FILE
    if mutants_path.exists():
        mutants = []
        for lineno, rec in enumerate(_read_jsonl(mutants_path), start=1):
            relations = {
                str(tid): str(rel)
                for tid, rel in _require(rec, "relations", mutants_path, lineno).items()
            }
            mutants.append(MutantRecord(
                mutant_id=str(_require(rec, "mutant_id", mutants_path, lineno)),
                mutated_location=_parse_location_ref(
                    _require(rec, "mutated_location", mutants_path, lineno),
                    program, mutants_path, lineno,
                ),
                relations=relations,
            ))
        kill_matrix = KillMatrix(mutants=tuple(mutants))

    predicate_trials = None
    trials_path = root / TRIALS_FILE
    if trials_path.exists():
        trials = []
        for lineno, rec in enumerate(_read_jsonl(trials_path), start=1):
            trials.append(PredicateTrial(
                test_id=_require(rec, "test_id", trials_path, lineno),
                predicate_location=_parse_location_ref(
                    _require(rec, "predicate_location", trials_path, lineno),
                    program, trials_path, lineno,
                ),
                evaluation_index=int(_require(rec, "evaluation_index", trials_path, lineno)),
                result=_require(rec, "result", trials_path, lineno),
                remaining_critical_count=int(_require(rec, "remaining_critical_count", trials_path, lineno)),
            ))
        predicate_trials = tuple(trials)

    stack_traces = None
    traces_path = root / TRACES_FILE
    if traces_path.exists():
        traces = []
        for lineno, rec in enumerate(_read_jsonl(traces_path), start=1):
            frames = _require(rec, "frames", traces_path, lineno)
            traces.append(StackTrace(
                test_id=_require(rec, "test_id", traces_path, lineno),
                frames=tuple(str(f) for f in frames),
            ))
        stack_traces = tuple(traces)

    edits = None
    edits_path = root / EDITS_FILE
    if edits_path.exists():
        edits = load_edits(edits_path)

    meta = {}
    meta_path = root / META_FILE
    if meta_path.exists():
        parsed = _read_json(meta_path)
        if isinstance(parsed, dict):
            meta = parsed

    evidence = TestEvidence(
        program=program,
        outcomes=tuple(outcomes),
        spectrum=CoverageSpectrum(per_test=per_test),
        kill_matrix=kill_matrix,
        predicate_trials=predicate_trials,
        stack_traces=stack_traces,
    )
    bug_id = str(meta.get("bug_id", root.name))
    return LoadedBug(bug_id=bug_id, evidence=evidence, edits=edits, meta=meta)


def _dump_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _dump_jsonl(path: Path, records: list[Any]) -> None:
    lines = [json.dumps(rec, sort_keys=True) for rec in records]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def dump_bundle(
    bundle_dir: str | Path,
    evidence: TestEvidence,
    edits: Optional[EditScript] = None,
    meta: Optional[dict] = None,
) -> None:
    """Serialize a bundle; load_bundle(dump_bundle(x)) is the identity."""
    root = Path(bundle_dir)
    root.mkdir(parents=True, exist_ok=True)
    program = evidence.program

    _dump_json(root / PROGRAM_FILE, {
        "locations": [
            {"module_path": loc.module_path, "line": loc.line, "kind": loc.kind, "scope_id": loc.scope_id}
            for loc in program.locations
        ],
        "scopes": [
            {"scope_id": s.scope_id, "level": s.level, "module_path": s.module_path, "parent": s.parent}
            for s in program.scopes
        ],
        "entity_count_by_granularity": dict(program.entity_count_by_granularity),
    })

    _dump_json(root / TESTS_FILE, {
        "outcomes": [
            {"test_id": o.test_id, "outcome": o.outcome, "crashed": o.crashed}
            for o in evidence.outcomes
        ],
    })

    _dump_jsonl(root / COVERAGE_FILE, [
        {"test_id": tid, "covered": sorted(covered)}
        for tid, covered in sorted(evidence.spectrum.per_test.items())
    ])

    if evidence.kill_matrix is not None:
        _dump_jsonl(root / MUTANTS_FILE, [
            {
                "mutant_id": m.mutant_id,
                "mutated_location": m.mutated_location.entity_id,
                "relations": {tid: rel for tid, rel in sorted(m.relations.items())},
            }
            for m in evidence.kill_matrix.mutants
        ])

    if evidence.predicate_trials is not None:
        _dump_jsonl(root / TRIALS_FILE, [
            {
                "test_id": t.test_id,
                "predicate_location": t.predicate_location.entity_id,
                "evaluation_index": t.evaluation_index,
                "result": t.result,
                "remaining_critical_count": t.remaining_critical_count,
            }
            for t in evidence.predicate_trials
        ])

    if evidence.stack_traces is not None:
        _dump_jsonl(root / TRACES_FILE, [
            {"test_id": t.test_id, "frames": list(t.frames)}
            for t in evidence.stack_traces
        ])

    if edits is not None:
        _dump_json(root / EDITS_FILE, {
            "edits": [
                {
                    "kind": e.kind,
                    "module_path": e.module_path,
                    **({"faulty_version_line": e.faulty_version_line} if e.faulty_version_line is not None else {}),
                    **({"insertion_gap": list(e.insertion_gap)} if e.insertion_gap is not None else {}),
                }
                for e in edits.edits
            ],
        })

    if meta:
        _dump_json(root / META_FILE, meta)
