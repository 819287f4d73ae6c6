"""Sandboxed test execution and failure description.

Runs three classic buggy programs in isolated interpreter processes,
classifies each outcome (logical / runtime / syntax), selects the
simplest failing test, and renders the one-sentence description that
feeds trajectory generation.
"""

from socdebug.execution import (
    describe_selected,
    is_buggy,
    render_convention,
    run_tests,
    select_simplest_failure,
)
from socdebug.model import TestCase

# %% A logical failure: operator precedence gives 2.5 instead of 2.0.

AVERAGE = """\
def calculate_average(x, y):
    return x + y / 2
"""
average_tests = [
    TestCase("calculate_average(1, 3)", "2.0", 1),
    TestCase("calculate_average(10, 30)", "20.0", 2),
]
report = run_tests(AVERAGE, average_tests)
for outcome in report.outcomes:
    print(f"test {outcome.ordinal}: {outcome.status} (actual={outcome.actual})")
print("buggy:", is_buggy(report))

# %% A runtime failure: pop(5) treats a value as an index.

TOP_K = """\
def top_k(lst, k):
    result = []
    for i in range(k):
        result.append(max(lst))
        lst.pop(max(lst))
    return result
"""
top_k_tests = [TestCase("top_k([1, 2, 3, 4, 5], 1)", "[5]", 1)]
report = run_tests(TOP_K, top_k_tests)
outcome = report.outcomes[0]
print(f"\ntop_k: {outcome.status}, {outcome.error_type} on line {outcome.line}")

# %% A syntax failure fails every test identically.

PALINDROME = """\
def is_palindrome(string):
    rev_string = ''
    for i in string:
        rev_string = i + rev_string
    if rev_string = string:
        return True
    else:
        return False
"""
palindrome_tests = [
    TestCase('is_palindrome("racecar")', "True", 1),
    TestCase('is_palindrome("abc")', "False", 2),
]
report = run_tests(PALINDROME, palindrome_tests)
print("\nis_palindrome:", [o.status for o in report.outcomes],
      "on line", report.outcomes[0].line)

# %% Selection picks syntax > runtime > logical, then simplest inputs;
# the description renders byte-exactly in the fixed convention.

report = run_tests(AVERAGE, average_tests)
selected = select_simplest_failure(report, average_tests)
description = describe_selected(selected)
print("\nselected test:", selected.test.call_expression)
print("description:", render_convention(description))

# %% Isolation: hangs time out, file access fails inside the sandbox.

report = run_tests("def spin():\n    while True:\n        pass\n",
                   [TestCase("spin()", None, 1)], timeout_ms=300)
print("\ninfinite loop ->", report.outcomes[0].status)

report = run_tests(
    "def peek():\n    return open('secrets.txt').read()\n",
    [TestCase("peek()", None, 1)],
)
print("file read ->", report.outcomes[0].status)
