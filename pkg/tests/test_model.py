from __future__ import annotations

import dataclasses

import pytest

from socdebug import store
from socdebug.model import (
    DebugSample,
    FailedTestDescription,
    Misconception,
    SolutionRecord,
    TestCase,
    validate_sample,
)

from .conftest import make_corpus


def test_complete_sample_has_no_violations(corpus):
    for sample in corpus:
        assert validate_sample(sample) == []


def test_empty_misconception_description_flagged(corpus):
    sample = corpus[0]
    broken = dataclasses.replace(
        sample,
        misconception=dataclasses.replace(sample.misconception, description="  "),
    )
    violations = validate_sample(broken)
    assert any(v.field == "misconception.description" for v in violations)


def test_logical_failure_requires_expected(corpus):
    sample = corpus[0]
    broken = dataclasses.replace(
        sample,
        failed_test=dataclasses.replace(sample.failed_test, expected=None),
    )
    violations = validate_sample(broken)
    assert any(v.field == "failed_test.expected" for v in violations)
    assert any("required" in v.rule for v in violations)


def test_runtime_failure_requires_line_and_error_type():
    failed = FailedTestDescription(
        kind="runtime", call_expression="f(1)", sentence="x", error_type=None, line=None
    )
    sample = DebugSample(
        sample_id="s",
        problem_description="p",
        buggy_source="def f(x): return x",
        failed_test=failed,
        misconception=Misconception(id="m", description="d", related_constructs=frozenset({"return"})),
    )
    fields = {v.field for v in validate_sample(sample)}
    assert "failed_test.line" in fields
    assert "failed_test.error_type" in fields


def test_related_constructs_may_be_empty_only_with_special_case():
    with_special = Misconception(id="m", description="d", special_case_id="recursion-call")
    without = Misconception(id="m", description="d")
    base = make_corpus()[0]
    ok = dataclasses.replace(base, misconception=with_special)
    bad = dataclasses.replace(base, misconception=without)
    assert validate_sample(ok) == []
    assert any(v.field == "misconception.related_constructs" for v in validate_sample(bad))


def test_validate_sample_is_pure(corpus):
    sample = corpus[0]
    first = validate_sample(sample)
    second = validate_sample(sample)
    assert first == second == []
    assert sample == make_corpus()[0]


def test_solution_record_rejects_duplicate_ordinals():
    tests = [
        TestCase(call_expression="f(1)", expected_value="1", ordinal=1),
        TestCase(call_expression="f(2)", expected_value="2", ordinal=1),
    ]
    with pytest.raises(ValueError, match="duplicate test ordinals"):
        SolutionRecord(problem_id="p", problem_description="d", source="def f(x): return x",
                       unit_tests=tuple(tests))


# --- persistence ----------------------------------------------------------------


def test_dataset_round_trip_is_identity(tmp_path, corpus):
    path = tmp_path / "samples.jsonl"
    store.save_dataset(corpus, path)
    assert store.load_dataset(path) == corpus


def test_round_trip_on_227_fixture_samples(tmp_path, corpus):
    samples = []
    for i in range(227):
        base = corpus[i % len(corpus)]
        samples.append(dataclasses.replace(base, sample_id=f"{base.sample_id}-{i}"))
    path = tmp_path / "samples.jsonl"
    store.save_dataset(samples, path)
    loaded = store.load_dataset(path)
    assert len(loaded) == 227
    assert loaded == samples


def test_empty_file_loads_empty_list(tmp_path):
    path = tmp_path / "samples.jsonl"
    path.write_text("", encoding="utf-8")
    assert store.load_dataset(path) == []


def test_unknown_field_rejected_with_field_name(tmp_path, corpus):
    path = tmp_path / "samples.jsonl"
    store.save_dataset(corpus[:1], path)
    record = path.read_text(encoding="utf-8").strip()
    patched = record[:-1] + ', "surprise": 1}'
    path.write_text(patched + "\n", encoding="utf-8")
    with pytest.raises(store.DatasetError, match="surprise"):
        store.load_dataset(path)


def test_malformed_record_names_line_number(tmp_path, corpus):
    path = tmp_path / "samples.jsonl"
    store.save_dataset(corpus[:1], path)
    path.write_text(path.read_text(encoding="utf-8") + "{not json}\n", encoding="utf-8")
    with pytest.raises(store.DatasetError, match="line 2"):
        store.load_dataset(path)


def test_missing_field_named(tmp_path):
    path = tmp_path / "samples.jsonl"
    path.write_text('{"schema_version": 1, "sample_id": "x"}\n', encoding="utf-8")
    with pytest.raises(store.DatasetError, match="problem"):
        store.load_dataset(path)


def test_stable_key_order(tmp_path, corpus):
    path_a = tmp_path / "a.jsonl"
    path_b = tmp_path / "b.jsonl"
    store.save_dataset(corpus, path_a)
    store.save_dataset(store.load_dataset(path_a), path_b)
    assert path_a.read_bytes() == path_b.read_bytes()


def test_manifest_round_trip_and_artifact_check(tmp_path):
    manifest = store.RunManifest(
        run_id="run-1",
        created_at="2026-01-01T00:00:00+00:00",
        config_ids=("gpt-5-low",),
        judge_config_id="judge-claude-sonnet-4-5-thinking",
        prompt_versions={"rt": "abc"},
        artifacts={"trajectories": "trajectories.jsonl"},
        sample_ids=("s1",),
    )
    path = tmp_path / "manifest.json"
    store.save_manifest(manifest, path)
    assert store.load_manifest(path) == manifest
    assert store.manifest_violations(manifest, tmp_path) == ["trajectories: trajectories.jsonl"]
    (tmp_path / "trajectories.jsonl").write_text("", encoding="utf-8")
    assert store.manifest_violations(manifest, tmp_path) == []
