"""Programming-construct extraction via syntax-tree walks plus regexes.

The vocabulary and the special-case registry live in data/constructs.json;
names are canonical lowercase strings matched by exact equality. Parse
failures never abort extraction: broken sources yield the textually
detectable constructs plus a "parse_failed" marker.
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

ConstructSet = frozenset[str]

PARSE_FAILED = "parse_failed"


class PatternError(KeyError):
    """Unknown special-case pattern id."""


@dataclass(frozen=True)
class PatternId:
    id: str
    description: str
    verifier: str  # tree | textual | combined
    origin: str  # documented | registry (implementer-designed)


@lru_cache(maxsize=1)
def _registry() -> dict:
    with resources.files("socdebug.data").joinpath("constructs.json").open(
        "r", encoding="utf-8"
    ) as f:
        return json.load(f)


@lru_cache(maxsize=1)
def construct_vocabulary() -> tuple[str, ...]:
    """All registered construct names (markers excluded), sorted."""
    return tuple(sorted(e["name"] for e in _registry()["constructs"]))


@lru_cache(maxsize=1)
def special_cases() -> dict[str, PatternId]:
    return {
        e["id"]: PatternId(e["id"], e["description"], e["verifier"], e["origin"])
        for e in _registry()["special_cases"]
    }


# --- tree scan ----------------------------------------------------------------


class _Scan:
    """Single-pass collection of everything the detectors need."""

    def __init__(self, tree: ast.AST):
        self.node_types: set[str] = set()
        self.binops: set[str] = set()
        self.cmpops: set[str] = set()
        self.boolops: set[str] = set()
        self.unaryops: set[str] = set()
        self.augops: set[str] = set()
        self.method_names: set[str] = set()
        self.builtin_calls: set[str] = set()
        self.tree = tree
        for node in ast.walk(tree):
            self.node_types.add(type(node).__name__)
            if isinstance(node, ast.BinOp):
                self.binops.add(type(node.op).__name__)
            elif isinstance(node, ast.Compare):
                self.cmpops.update(type(op).__name__ for op in node.ops)
            elif isinstance(node, ast.BoolOp):
                self.boolops.add(type(node.op).__name__)
            elif isinstance(node, ast.UnaryOp):
                self.unaryops.add(type(node.op).__name__)
            elif isinstance(node, ast.AugAssign):
                self.augops.add(type(node.op).__name__)
            elif isinstance(node, ast.Call):
                if isinstance(node.func, ast.Attribute):
                    self.method_names.add(node.func.attr)
                elif isinstance(node.func, ast.Name):
                    self.builtin_calls.add(node.func.id)


def _functions(tree: ast.AST):
    return [
        n for n in ast.walk(tree)
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
    ]


def _calls_name(node: ast.AST, name: str) -> bool:
    for n in ast.walk(node):
        if isinstance(n, ast.Call):
            f = n.func
            if isinstance(f, ast.Name) and f.id == name:
                return True
            if isinstance(f, ast.Attribute) and f.attr == name:
                return True  # self.f(...) style recursion inside methods
    return False


def _binop_combo(tree: ast.AST, first: str, second: str) -> bool:
    """Both operators inside one expression subtree."""
    for node in ast.walk(tree):
        if isinstance(node, ast.BinOp):
            ops = {type(n.op).__name__ for n in ast.walk(node) if isinstance(n, ast.BinOp)}
            if first in ops and second in ops:
                return True
    return False


def _loop_in_loop(tree: ast.AST) -> bool:
    loops = (ast.For, ast.AsyncFor, ast.While)
    for node in ast.walk(tree):
        if isinstance(node, loops):
            for inner in ast.walk(node):
                if inner is not node and isinstance(inner, loops):
                    return True
    return False


def _feature_recursion(scan: _Scan) -> bool:
    return any(_calls_name(f, f.name) for f in _functions(scan.tree))


def _feature_class_init(scan: _Scan) -> bool:
    for node in ast.walk(scan.tree):
        if isinstance(node, ast.ClassDef):
            for inner in node.body:
                if isinstance(inner, ast.FunctionDef) and inner.name == "__init__":
                    return True
    return False


_FEATURES = {
    "default_argument": lambda s: any(
        f.args.defaults or [d for d in f.args.kw_defaults if d is not None]
        for f in _functions(s.tree)
    ),
    "vararg": lambda s: any(f.args.vararg for f in _functions(s.tree)),
    "kwarg": lambda s: any(f.args.kwarg for f in _functions(s.tree)),
    "nested_function": lambda s: any(
        any(inner is not f and isinstance(inner, (ast.FunctionDef, ast.AsyncFunctionDef))
            for inner in ast.walk(f))
        for f in _functions(s.tree)
    ),
    "method_definition": lambda s: any(
        isinstance(inner, (ast.FunctionDef, ast.AsyncFunctionDef))
        for node in ast.walk(s.tree) if isinstance(node, ast.ClassDef)
        for inner in node.body
    ),
    "class_init": _feature_class_init,
    "recursion": _feature_recursion,
    "chained_comparison": lambda s: any(
        isinstance(n, ast.Compare) and len(n.ops) > 1 for n in ast.walk(s.tree)
    ),
    "multiple_assignment": lambda s: any(
        isinstance(n, ast.Assign) and len(n.targets) > 1 for n in ast.walk(s.tree)
    ),
    "tuple_unpacking": lambda s: any(
        isinstance(n, ast.Assign)
        and any(isinstance(t, (ast.Tuple, ast.List)) for t in n.targets)
        for n in ast.walk(s.tree)
    ),
    "string_literal": lambda s: any(
        isinstance(n, ast.Constant) and isinstance(n.value, str)
        for n in ast.walk(s.tree)
    ),
    "indexing": lambda s: any(
        isinstance(n, ast.Subscript) and not isinstance(n.slice, ast.Slice)
        for n in ast.walk(s.tree)
    ),
    "slicing": lambda s: any(
        isinstance(n, ast.Subscript) and isinstance(n.slice, ast.Slice)
        for n in ast.walk(s.tree)
    ),
    "negative_index": lambda s: any(
        isinstance(n, ast.Subscript)
        and isinstance(n.slice, ast.UnaryOp)
        and isinstance(n.slice.op, ast.USub)
        and isinstance(n.slice.operand, ast.Constant)
        for n in ast.walk(s.tree)
    ),
    "string_concatenation": lambda s: any(
        isinstance(n, ast.BinOp)
        and isinstance(n.op, ast.Add)
        and any(
            (isinstance(side, ast.Constant) and isinstance(side.value, str))
            or isinstance(side, ast.JoinedStr)
            for side in (n.left, n.right)
        )
        for n in ast.walk(s.tree)
    ),
    "nested_loop": lambda s: _loop_in_loop(s.tree),
    "method_chaining": lambda s: any(
        isinstance(n, ast.Attribute) and isinstance(n.value, ast.Call)
        and isinstance(n.value.func, ast.Attribute)
        for n in ast.walk(s.tree)
    ),
    "combo_add_div": lambda s: _binop_combo(s.tree, "Add", "Div"),
    "combo_add_mult": lambda s: _binop_combo(s.tree, "Add", "Mult"),
    "combo_sub_div": lambda s: _binop_combo(s.tree, "Sub", "Div"),
    "combo_and_or": lambda s: any(
        isinstance(node, ast.BoolOp)
        and {"And", "Or"}
        <= {type(n.op).__name__ for n in ast.walk(node) if isinstance(n, ast.BoolOp)}
        for node in ast.walk(s.tree)
    ),
}


def _entry_present(entry: dict, scan: _Scan) -> bool:
    kind = entry["kind"]
    if kind == "node":
        return bool(scan.node_types & set(entry["value"]))
    if kind == "binop":
        return bool(scan.binops & set(entry["value"]))
    if kind == "cmpop":
        return bool(scan.cmpops & set(entry["value"]))
    if kind == "boolop":
        return bool(scan.boolops & set(entry["value"]))
    if kind == "unaryop":
        return bool(scan.unaryops & set(entry["value"]))
    if kind == "augop":
        return bool(scan.augops & set(entry["value"]))
    if kind == "method":
        return bool(scan.method_names & set(entry["value"]))
    if kind == "builtin":
        return bool(scan.builtin_calls & set(entry["value"]))
    if kind == "feature":
        return _FEATURES[entry["value"]](scan)
    if kind == "regex":
        return False  # handled textually for parsed sources too
    raise ValueError(f"unknown detector kind: {kind!r}")


def _textual_hits(source: str) -> set[str]:
    found = set()
    for entry in _registry()["constructs"]:
        pattern = entry.get("textual")
        if pattern and re.search(pattern, source, re.MULTILINE):
            found.add(entry["name"])
    return found


def extract_constructs(source: str) -> ConstructSet:
    """Every registered construct present in the source, as a frozen set.

    Unparseable sources degrade to textual detection plus "parse_failed";
    the result is deterministic for a fixed source.
    """
    try:
        tree = ast.parse(source)
    except (SyntaxError, ValueError):
        if not source.strip():
            return frozenset()
        return frozenset(_textual_hits(source) | {PARSE_FAILED})

    scan = _Scan(tree)
    found = {
        e["name"]
        for e in _registry()["constructs"]
        if e["kind"] != "regex" and _entry_present(e, scan)
    }
    # regex-kind entries (elif/else/finally/decorator) have no tree signal
    for entry in _registry()["constructs"]:
        if entry["kind"] == "regex" and re.search(entry["textual"], source, re.MULTILINE):
            found.add(entry["name"])
    return frozenset(found)


# --- special-case verifiers -----------------------------------------------------

_ASSIGN_IN_CONDITION_RE = re.compile(r"^\s*(?:if|while)\b[^=!<>\n]*=(?!=)", re.MULTILINE)
_CLASS_INIT_RE = re.compile(r"def __init__")
_PLUS_DIV_RE = re.compile(r"\+[^\n]*/|/[^\n]*\+")


def _tree_verifiers() -> dict:
    return {
        "recursion-call": _feature_recursion,
        "class-init": _feature_class_init,
        "plus-div-precedence": lambda s: _binop_combo(s.tree, "Add", "Div"),
        "range-in-for": lambda s: any(
            isinstance(n, ast.For)
            and isinstance(n.iter, ast.Call)
            and isinstance(n.iter.func, ast.Name)
            and n.iter.func.id == "range"
            for n in ast.walk(s.tree)
        ),
        "mutable-default-argument": lambda s: any(
            any(isinstance(d, (ast.List, ast.Dict, ast.Set)) for d in f.args.defaults)
            for f in _functions(s.tree)
        ),
        "discarded-method-call": lambda s: any(
            isinstance(n, ast.Expr)
            and isinstance(n.value, ast.Call)
            and isinstance(n.value.func, ast.Attribute)
            for n in ast.walk(s.tree)
        ),
        "integer-literal-index": lambda s: any(
            isinstance(n, ast.Subscript)
            and isinstance(n.slice, ast.Constant)
            and isinstance(n.slice.value, int)
            and not isinstance(n.slice.value, bool)
            for n in ast.walk(s.tree)
        ),
        "negative-index": _FEATURES["negative_index"],
        "slice-bounds": lambda s: any(
            isinstance(n, ast.Slice) and (n.lower is not None or n.upper is not None)
            for n in ast.walk(s.tree)
        ),
        "float-equality": lambda s: any(
            isinstance(n, ast.Compare)
            and any(isinstance(op, ast.Eq) for op in n.ops)
            and any(
                isinstance(side, ast.Constant) and isinstance(side.value, float)
                for side in [n.left, *n.comparators]
            )
            for n in ast.walk(s.tree)
        ),
        "chained-comparison": _FEATURES["chained_comparison"],
        "nested-loops": lambda s: _loop_in_loop(s.tree),
        "while-counter-update": lambda s: any(
            isinstance(n, ast.While)
            and any(isinstance(inner, ast.AugAssign) for inner in ast.walk(n))
            for n in ast.walk(s.tree)
        ),
        "print-no-return": lambda s: any(
            _calls_name(f, "print")
            and not any(isinstance(n, ast.Return) for n in ast.walk(f))
            for f in _functions(s.tree)
        ),
        "and-or-mix": _FEATURES["combo_and_or"],
    }


_TEXTUAL_VERIFIERS = {
    "assignment-in-condition": _ASSIGN_IN_CONDITION_RE,
    "class-init": _CLASS_INIT_RE,
    "plus-div-precedence": _PLUS_DIV_RE,
}


def matches_pattern(source: str, pattern_id: str) -> bool:
    """True iff the special-case verifier's condition holds for the source.

    Tree verifiers need a parseable source (else False); combined
    verifiers fall back to their textual check; textual verifiers never
    parse. Pure, and raises PatternError for unregistered ids.
    """
    pattern = special_cases().get(pattern_id)
    if pattern is None:
        raise PatternError(f"unknown special-case pattern: {pattern_id!r}")

    if pattern.verifier == "textual":
        return bool(_TEXTUAL_VERIFIERS[pattern_id].search(source))

    try:
        tree = ast.parse(source)
    except (SyntaxError, ValueError):
        if pattern.verifier == "combined":
            return bool(_TEXTUAL_VERIFIERS[pattern_id].search(source))
        return False
    return bool(_tree_verifiers()[pattern_id](_Scan(tree)))
