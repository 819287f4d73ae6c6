"""Construct extraction and misconception-solution pairing, end to end.

Walks through the two dataset-construction stages: extracting programming
constructs from solution code, then the round-robin pairing loop that
matches misconceptions to solutions by construct overlap (with special
cases overriding overlap where a code pattern is required).
"""

from socdebug.constructs import (
    construct_vocabulary,
    extract_constructs,
    matches_pattern,
    special_cases,
)
from socdebug.model import Misconception
from socdebug.pairing import CandidateSolution, pair, pairing_report

# %% The vocabulary is data-driven: 130+ canonical names.

vocabulary = construct_vocabulary()
print(f"registered constructs: {len(vocabulary)}")
print("a few of them:", ", ".join(vocabulary[:6]), "...")

# %% Extract constructs from a couple of solutions.

AVERAGE = """\
def average(x, y):
    return (x + y) / 2
"""

FACTORIAL = """\
def factorial(n):
    if n < 2:
        return 1
    return n * factorial(n - 1)
"""

SPLITTER = """\
def words(sentence):
    parts = sentence.split()
    out = []
    for p in parts:
        out.append(p.lower())
    return out
"""

for name, source in [("average", AVERAGE), ("factorial", FACTORIAL), ("splitter", SPLITTER)]:
    print(f"\n{name}: {sorted(extract_constructs(source))}")

# %% Special-case patterns answer "does this code verify the condition?"

print("\nspecial cases registered:", len(special_cases()))
print("factorial recursion-call:", matches_pattern(FACTORIAL, "recursion-call"))
print("average plus-div-precedence:", matches_pattern(AVERAGE, "plus-div-precedence"))

# %% Pair three misconceptions against the three solutions.

misconceptions = [
    Misconception(
        id="loops-once",
        description="A for loop body runs exactly once.",
        related_constructs=frozenset({"for loop"}),
    ),
    Misconception(
        id="recursion-stops-itself",
        description="A recursive call stops on its own without a base case.",
        related_constructs=frozenset({"recursion"}),
        special_case_id="recursion-call",
    ),
    Misconception(
        id="plus-binds-tighter",
        description="+ has higher precedence than /.",
        related_constructs=frozenset({"operator +", "operator /"}),
        special_case_id="plus-div-precedence",
    ),
]

solutions = []
for sid, source in [("average", AVERAGE), ("factorial", FACTORIAL), ("splitter", SPLITTER)]:
    solutions.append(
        CandidateSolution(
            solution_id=sid,
            constructs=extract_constructs(source),
            special_cases=frozenset(
                p for p in special_cases() if matches_pattern(source, p)
            ),
        )
    )

result = pair(misconceptions, solutions, target_count=3)
print("\npairings:")
for p in result.pairings:
    how = "special case" if p.matched_by_special_case and p.overlap_score == 0 else \
        f"overlap {p.overlap_score} ({', '.join(sorted(p.matched_constructs))})"
    print(f"  {p.misconception_id} <- {p.solution_id}  via {how}")

print("\nper-misconception counts:", pairing_report(result.pairings))
print("selection trace has", len(result.trace), "visits; every argmax is replayable")
