"""Sandboxed test execution of untrusted student code (subprocess side).

Reads one job JSON from stdin ({"source", "tests": [{"call", "expected"?}],
"timeout_ms"?}), runs every test call under exception capture, and emits
exactly one report JSON on stdout with one entry per test. Student-code
failures are data in the report; a nonzero exit happens only for protocol
errors (malformed job).

This file is deliberately self-contained (standard library only, no
package imports): the parent process invokes it by path as
`python sandbox_runner.py` with no arguments, so the wire protocol is the
only coupling. Resource limits and a per-test alarm are applied before
any student code runs.
"""

import ast
import contextlib
import io
import json
import math
import signal
import sys
import time
import traceback

STUDENT_FILE = "<student>"
DEFAULT_TIMEOUT_MS = 5000

# Modules beginner code commonly imports; preloading keeps `import math`
# working after new file opens are blocked.
_PRELOAD = ("math", "random", "string", "re", "collections", "itertools",
            "functools", "heapq", "copy")


class _Timeout(Exception):
    pass


def _alarm(_signum, _frame):
    raise _Timeout()


def _apply_limits():
    """Best-effort confinement: no new file descriptors, bounded memory/CPU.

    Blocking new fds stops both file access and sockets; stdio stays usable
    because those descriptors are already open.
    """
    for name in _PRELOAD:
        try:
            __import__(name)
        except ImportError:
            pass
    try:
        import resource

        resource.setrlimit(resource.RLIMIT_NOFILE, (0, 0))
        soft = 1 << 31  # 2 GiB address space cap
        resource.setrlimit(resource.RLIMIT_AS, (soft, soft))
    except (ImportError, ValueError, OSError):
        pass


def _student_line(exc):
    """Line number of the deepest traceback frame inside the student source."""
    frames = traceback.extract_tb(exc.__traceback__)
    line = None
    for frame in frames:
        if frame.filename == STUDENT_FILE:
            line = frame.lineno
    if line is None and frames:
        line = frames[-1].lineno
    return line


def _values_equal(actual, expected_text):
    """Value equality of the student language against a serialized literal.

    A top-level float expected value compares at relative tolerance 1e-9;
    everything else is exact. An unparseable expected literal falls back
    to comparing reprs.
    """
    try:
        expected = ast.literal_eval(expected_text)
    except (ValueError, SyntaxError):
        return repr(actual) == expected_text
    if isinstance(expected, float) and isinstance(actual, (int, float)):
        if math.isnan(expected):
            return isinstance(actual, float) and math.isnan(actual)
        return math.isclose(actual, expected, rel_tol=1e-9, abs_tol=0.0)
    try:
        return bool(actual == expected)
    except Exception:
        return False


def _run_one(code, call, expected, timeout_s):
    """Execute the module source plus one test call; returns a report entry."""
    entry = {"status": "passed", "actual": None, "error_type": None,
             "line": None, "duration_ms": 0.0}
    namespace = {"__name__": "__main__"}
    started = time.monotonic()
    signal.setitimer(signal.ITIMER_REAL, timeout_s)
    try:
        # Student prints must not contaminate the report stream.
        with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
            exec(code, namespace)
            value = eval(compile(call, "<call>", "eval"), namespace)
    except _Timeout:
        entry["status"] = "timeout"
    except BaseException as exc:  # student code may raise anything
        entry["status"] = "runtime"
        entry["error_type"] = type(exc).__name__
        entry["line"] = _student_line(exc)
    else:
        entry["actual"] = repr(value)
        if expected is not None and not _values_equal(value, expected):
            entry["status"] = "logical"
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
    entry["duration_ms"] = round((time.monotonic() - started) * 1000.0, 3)
    return entry


def execute_job(job):
    source = job["source"]
    tests = job["tests"]
    timeout_s = job.get("timeout_ms", DEFAULT_TIMEOUT_MS) / 1000.0

    try:
        code = compile(source, STUDENT_FILE, "exec")
    except SyntaxError as exc:
        # A parse failure fails every test identically.
        return {
            "tests": [
                {"ordinal": i, "status": "syntax", "actual": None,
                 "error_type": "SyntaxError", "line": exc.lineno,
                 "duration_ms": 0.0}
                for i in range(1, len(tests) + 1)
            ]
        }

    entries = []
    for i, test in enumerate(tests, start=1):
        entry = _run_one(code, test["call"], test.get("expected"), timeout_s)
        entry["ordinal"] = i
        entries.append(
            {k: entry[k] for k in
             ("ordinal", "status", "actual", "error_type", "line", "duration_ms")}
        )
    return {"tests": entries}


def main():
    raw = sys.stdin.read()
    try:
        job = json.loads(raw)
        if not isinstance(job, dict) or "source" not in job or "tests" not in job:
            raise ValueError("job must be an object with 'source' and 'tests'")
        if not isinstance(job["source"], str) or not isinstance(job["tests"], list):
            raise ValueError("'source' must be a string and 'tests' a list")
        for t in job["tests"]:
            if not isinstance(t, dict) or "call" not in t:
                raise ValueError("each test must be an object with a 'call'")
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"malformed job: {exc}", file=sys.stderr)
        return 2

    signal.signal(signal.SIGALRM, _alarm)
    _apply_limits()
    report = execute_job(job)
    sys.stdout.write(json.dumps(report))
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
