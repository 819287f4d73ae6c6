from __future__ import annotations

import json
import subprocess
import sys

import pytest

from socdebug.execution import (
    DescribeFailureError,
    ExecutionReport,
    RUNNER_PATH,
    SandboxError,
    TestOutcome,
    describe_failure,
    describe_selected,
    is_buggy,
    parse_convention_sentence,
    render_convention,
    run_many,
    run_tests,
    select_simplest_failure,
)
from socdebug.gateway import Gateway, MockTransport, RateLimitError
from socdebug.model import FailedTestDescription, TestCase

from .conftest import (
    CALCULATE_AVERAGE_SRC,
    COUNT_WORDS_SRC,
    IS_PALINDROME_SRC,
    TOP_K_SRC,
    VOWEL_REPLACE_SRC,
    solution_tests,
)


def test_calculate_average_is_a_logical_failure():
    report = run_tests(CALCULATE_AVERAGE_SRC, solution_tests("calculate-average"))
    first = report.outcomes[0]
    assert first.status == "logical"
    assert first.actual == "2.5"


def test_top_k_raises_index_error_on_line_5():
    report = run_tests(TOP_K_SRC, solution_tests("top-k"))
    first = report.outcomes[0]
    assert first.status == "runtime"
    assert first.error_type == "IndexError"
    assert first.line == 5


def test_is_palindrome_fails_every_test_with_syntax_on_line_5():
    tests = solution_tests("is-palindrome")
    report = run_tests(IS_PALINDROME_SRC, tests)
    assert len(report.outcomes) == len(tests)
    for outcome in report.outcomes:
        assert outcome.status == "syntax"
        assert outcome.line == 5


def test_count_words_returns_2_instead_of_3():
    report = run_tests(COUNT_WORDS_SRC, solution_tests("count-words"))
    assert report.outcomes[0].status == "logical"
    assert report.outcomes[0].actual == "2"


def test_vowel_replace_returns_unchanged_string():
    report = run_tests(VOWEL_REPLACE_SRC, solution_tests("vowel-replace"))
    assert report.outcomes[0].status == "logical"
    assert report.outcomes[0].actual == "'a'"


def test_correct_code_passes_with_float_tolerance():
    source = "def calculate_average(x, y):\n    return (x + y) / 2\n"
    report = run_tests(source, solution_tests("calculate-average"))
    assert [o.status for o in report.outcomes] == ["passed", "passed"]


def test_rerun_yields_identical_report_modulo_duration():
    tests = solution_tests("top-k")
    strip = lambda r: [
        (o.ordinal, o.status, o.actual, o.error_type, o.line) for o in r.outcomes
    ]
    assert strip(run_tests(TOP_K_SRC, tests)) == strip(run_tests(TOP_K_SRC, tests))


def test_infinite_loop_times_out():
    source = "def spin():\n    while True:\n        pass\n"
    tests = [TestCase(call_expression="spin()", expected_value=None, ordinal=1)]
    report = run_tests(source, tests, timeout_ms=400)
    assert report.outcomes[0].status == "timeout"


def test_file_read_attempt_is_a_runtime_failure():
    source = (
        "def peek():\n"
        "    with open('pyproject.toml') as f:\n"
        "        return f.read()\n"
    )
    tests = [TestCase(call_expression="peek()", expected_value=None, ordinal=1)]
    report = run_tests(source, tests)
    assert report.outcomes[0].status == "runtime"


def test_network_attempt_is_a_runtime_failure():
    source = (
        "import socket\n"
        "def dial():\n"
        "    s = socket.socket()\n"
        "    s.connect(('127.0.0.1', 9))\n"
        "    return True\n"
    )
    tests = [TestCase(call_expression="dial()", expected_value=None, ordinal=1)]
    report = run_tests(source, tests)
    assert report.outcomes[0].status == "runtime"


def test_student_prints_do_not_corrupt_the_report():
    source = "print('hello')\ndef f():\n    print('again')\n    return 1\n"
    tests = [TestCase(call_expression="f()", expected_value="1", ordinal=1)]
    report = run_tests(source, tests)
    assert report.outcomes[0].status == "passed"


def test_is_buggy(caplog):
    passing = ExecutionReport(outcomes=(TestOutcome(ordinal=1, status="passed"),))
    failing = ExecutionReport(
        outcomes=(TestOutcome(ordinal=1, status="passed"),
                  TestOutcome(ordinal=2, status="logical"))
    )
    assert not is_buggy(passing)
    assert is_buggy(failing)
    with caplog.at_level("WARNING", logger="socdebug.execution"):
        assert not is_buggy(ExecutionReport(outcomes=()))  # vacuous pass
    assert any("empty report" in r.message for r in caplog.records)


def test_run_many_isolates_reports():
    jobs = [
        (CALCULATE_AVERAGE_SRC, solution_tests("calculate-average")),
        (TOP_K_SRC, solution_tests("top-k")),
    ]
    reports = run_many(jobs, max_jobs=2)
    assert reports[0].outcomes[0].status == "logical"
    assert reports[1].outcomes[0].status == "runtime"


# --- selection ------------------------------------------------------------------


def test_syntax_beats_other_failures():
    report = ExecutionReport(
        outcomes=(TestOutcome(1, "syntax", line=5), TestOutcome(2, "syntax", line=5))
    )
    tests = [
        TestCase("f([1, 2, 3, 4], 2)", "1", 1),
        TestCase("f(1)", "1", 2),
    ]
    selected = select_simplest_failure(report, tests)
    assert selected.outcome.status == "syntax"
    assert selected.test.ordinal == 2  # same way of failing -> simplest inputs


def test_runtime_beats_logical():
    report = ExecutionReport(
        outcomes=(TestOutcome(1, "logical", actual="1"),
                  TestOutcome(2, "runtime", error_type="ValueError", line=3))
    )
    tests = [TestCase("f(1)", "2", 1), TestCase("f(2, 3, 4, 5, 6, 7)", None, 2)]
    assert select_simplest_failure(report, tests).test.ordinal == 2


def test_simplest_inputs_win_among_logical_failures():
    big_call = "f([" + ", ".join(str(i) for i in range(1, 101)) + "], 50)"
    report = ExecutionReport(
        outcomes=(TestOutcome(1, "logical", actual="9"),
                  TestOutcome(2, "logical", actual="9"))
    )
    tests = [TestCase(big_call, "1", 1), TestCase("f(1, 3)", "2.0", 2)]
    assert select_simplest_failure(report, tests).test.call_expression == "f(1, 3)"


def test_ties_break_to_first_failing_test():
    report = ExecutionReport(
        outcomes=(TestOutcome(1, "logical", actual="1"),
                  TestOutcome(2, "logical", actual="1"))
    )
    tests = [TestCase("f(7)", "0", 1), TestCase("f(9)", "0", 2)]
    assert select_simplest_failure(report, tests).test.ordinal == 1


def test_single_failing_test_selected():
    report = ExecutionReport(
        outcomes=(TestOutcome(1, "passed"), TestOutcome(2, "logical", actual="1"))
    )
    tests = [TestCase("f(1)", "1", 1), TestCase("f(2)", "3", 2)]
    assert select_simplest_failure(report, tests).test.ordinal == 2


def test_selection_requires_a_failure():
    report = ExecutionReport(outcomes=(TestOutcome(1, "passed"),))
    with pytest.raises(ValueError):
        select_simplest_failure(report, [TestCase("f(1)", "1", 1)])


def test_selection_is_a_total_order_over_permutations():
    outcomes = (
        TestOutcome(1, "logical", actual="1"),
        TestOutcome(2, "runtime", error_type="TypeError", line=2),
        TestOutcome(3, "logical", actual="2"),
    )
    tests = [TestCase("f(100)", "0", 1), TestCase("f(2, 'xx')", None, 2),
             TestCase("f(3)", "0", 3)]
    expected = select_simplest_failure(ExecutionReport(outcomes=outcomes), tests)
    for perm in ((2, 0, 1), (1, 2, 0), (0, 2, 1)):
        shuffled = ExecutionReport(outcomes=tuple(outcomes[i] for i in perm))
        again = select_simplest_failure(shuffled, tests)
        assert again.test.ordinal == expected.test.ordinal


# --- conventions ------------------------------------------------------------------


def test_convention_rendering_is_byte_exact():
    logical = FailedTestDescription(
        kind="logical", call_expression="calculate_average(1, 3)",
        sentence="-", actual="2.5", expected="2.0",
    )
    assert render_convention(logical) == (
        "When called as calculate_average(1, 3), the function returns 2.5; "
        "whereas the expected result is 2.0."
    )
    runtime = FailedTestDescription(
        kind="runtime", call_expression="top_k([1, 2, 3, 4, 5], 1)",
        sentence="-", error_type="IndexError", line=5,
    )
    assert render_convention(runtime) == (
        "When called as top_k([1, 2, 3, 4, 5], 1), the function raises "
        "IndexError on line 5."
    )
    syntax = FailedTestDescription(
        kind="syntax", call_expression='is_palindrome("racecar")',
        sentence="-", line=5,
    )
    assert render_convention(syntax) == (
        'When called as is_palindrome("racecar"), the function produces a '
        "SyntaxError on line 5."
    )


def test_render_convention_rejects_missing_fields():
    with pytest.raises(ValueError):
        render_convention(FailedTestDescription(kind="logical", call_expression="f()",
                                                sentence="-", actual="1"))
    with pytest.raises(ValueError):
        render_convention(FailedTestDescription(kind="runtime", call_expression="f()",
                                                sentence="-", error_type="E"))


def test_parse_convention_round_trips():
    for kind, kw in [
        ("logical", dict(actual="2.5", expected="2.0")),
        ("runtime", dict(error_type="IndexError", line=5)),
        ("syntax", dict(line=5)),
    ]:
        base = FailedTestDescription(kind=kind, call_expression="f(1, 2)", sentence="-", **kw)
        sentence = render_convention(base)
        parsed = parse_convention_sentence(sentence)
        assert parsed is not None
        assert parsed.kind == kind
        assert parsed.sentence == sentence
    assert parse_convention_sentence("The function is wrong somehow.") is None


# --- describe_failure --------------------------------------------------------------


def _average_fixture():
    tests = solution_tests("calculate-average")
    report = run_tests(CALCULATE_AVERAGE_SRC, tests)
    return report, tests


def test_describe_failure_accepts_valid_llm_sentence():
    report, tests = _average_fixture()
    sentence = (
        "When called as calculate_average(1, 3), the function returns 2.5; "
        "whereas the expected result is 2.0."
    )
    gateway = Gateway(MockTransport({"": [sentence]}))
    description = describe_failure(gateway, "Average two numbers.",
                                   CALCULATE_AVERAGE_SRC, report, tests)
    assert description.kind == "logical"
    assert description.sentence == sentence


def test_describe_failure_falls_back_on_invalid_output():
    report, tests = _average_fixture()
    gateway = Gateway(MockTransport({"": ["It fails because of precedence."]}))
    description = describe_failure(gateway, "Average two numbers.",
                                   CALCULATE_AVERAGE_SRC, report, tests)
    assert description == describe_selected(select_simplest_failure(report, tests))


def test_describe_failure_error_carries_fallback():
    report, tests = _average_fixture()
    always_limited = MockTransport({"": [RateLimitError("429")] * 5})
    gateway = Gateway(always_limited, sleep=lambda _s: None)
    with pytest.raises(DescribeFailureError) as excinfo:
        describe_failure(gateway, "Average two numbers.",
                         CALCULATE_AVERAGE_SRC, report, tests)
    assert excinfo.value.fallback.kind == "logical"
    assert excinfo.value.fallback.actual == "2.5"


def test_deterministic_description_of_fixture_matches_convention():
    report, tests = _average_fixture()
    description = describe_selected(select_simplest_failure(report, tests))
    assert description.sentence == (
        "When called as calculate_average(1, 3), the function returns 2.5; "
        "whereas the expected result is 2.0."
    )


# --- wire protocol ------------------------------------------------------------------


def test_runner_rejects_malformed_job_with_nonzero_exit():
    proc = subprocess.run(
        [sys.executable, str(RUNNER_PATH)],
        input="this is not json",
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode != 0
    assert proc.stderr.strip()


def test_runner_emits_exactly_one_json_document():
    job = {"source": "def f():\n    return 1\n",
           "tests": [{"call": "f()", "expected": "1"}]}
    proc = subprocess.run(
        [sys.executable, str(RUNNER_PATH)],
        input=json.dumps(job),
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)  # whole stdout is one document
    assert payload["tests"][0]["status"] == "passed"


def test_runner_handles_zero_tests():
    job = {"source": "x = 1\n", "tests": []}
    proc = subprocess.run(
        [sys.executable, str(RUNNER_PATH)],
        input=json.dumps(job),
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"tests": []}


def test_sandbox_error_for_broken_runner(tmp_path):
    bad_runner = tmp_path / "broken.py"
    bad_runner.write_text("import sys\nsys.exit(3)\n", encoding="utf-8")
    with pytest.raises(SandboxError):
        run_tests("x = 1", [TestCase("f()", None, 1)], runner=bad_runner)


def test_module_level_crash_reports_runtime_for_all_tests():
    source = "raise RuntimeError('boom')\n"
    tests = [TestCase("f()", None, 1), TestCase("g()", None, 2)]
    report = run_tests(source, tests)
    assert [o.status for o in report.outcomes] == ["runtime", "runtime"]
    assert report.outcomes[0].error_type == "RuntimeError"
    assert report.outcomes[0].line == 1
