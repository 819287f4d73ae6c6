"""Deterministic misconception-solution pairing by construct overlap.

Misconceptions are visited round-robin in input order; each visit takes
the highest-scoring unused eligible solution, where a solution is
eligible when the overlap score is at least 1 or the misconception's
special-case pattern matches it. Score ties break to the lowest solution
ordinal in the input list. The loop stops at the target count, or two
earlier once a full round-robin cycle adds no pairing (candidates are
exhausted) so that unreachable targets still halt.

Everything here is order-driven and stateful (used set, round-robin
index): single-threaded by contract. A selection trace is emitted so the
argmax choice is independently replayable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import Misconception

ConstructSet = frozenset[str]


@dataclass(frozen=True)
class CandidateSolution:
    """A solution reduced to its pairing signals."""

    solution_id: str
    constructs: ConstructSet
    special_cases: frozenset[str] = frozenset()  # pattern ids the source matches

    def __post_init__(self) -> None:
        object.__setattr__(self, "constructs", frozenset(self.constructs))
        object.__setattr__(self, "special_cases", frozenset(self.special_cases))


@dataclass(frozen=True)
class Pairing:
    misconception_id: str
    solution_id: str
    overlap_score: int
    matched_constructs: frozenset[str]
    matched_by_special_case: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "matched_constructs", frozenset(self.matched_constructs))
        if self.overlap_score != len(self.matched_constructs):
            raise ValueError("overlap_score must equal |matched_constructs|")
        if self.overlap_score < 1 and not self.matched_by_special_case:
            raise ValueError("a pairing needs overlap >= 1 or a special-case match")


@dataclass(frozen=True)
class CandidateScore:
    solution_id: str
    ordinal: int
    score: int
    special_case: bool


@dataclass(frozen=True)
class TraceEvent:
    """One round-robin visit: who was considered and what was chosen."""

    visit: int
    misconception_id: str
    candidates: tuple[CandidateScore, ...]
    chosen_solution_id: str | None


@dataclass(frozen=True)
class PairingResult:
    pairings: tuple[Pairing, ...]
    trace: tuple[TraceEvent, ...]
    exhausted: bool  # candidates ran out before reaching the target


def overlap_score(a: ConstructSet, b: ConstructSet) -> int:
    """Cardinality of the construct intersection; symmetric."""
    return len(frozenset(a) & frozenset(b))


def pair(
    misconceptions: Sequence[Misconception],
    solutions: Sequence[CandidateSolution],
    target_count: int,
) -> PairingResult:
    """Run the round-robin pairing loop; fully deterministic."""
    if target_count < 0:
        raise ValueError("target_count must be >= 0")

    used: set[str] = set()
    pairings: list[Pairing] = []
    trace: list[TraceEvent] = []
    visit = 0
    empty_visits = 0
    exhausted = False

    while len(pairings) < target_count:
        if not misconceptions or empty_visits >= len(misconceptions):
            exhausted = True
            break
        m = misconceptions[visit % len(misconceptions)]

        candidates: list[CandidateScore] = []
        for ordinal, s in enumerate(solutions):
            if s.solution_id in used:
                continue
            matched = m.related_constructs & s.constructs
            special = m.special_case_id is not None and m.special_case_id in s.special_cases
            if matched or special:
                candidates.append(
                    CandidateScore(s.solution_id, ordinal, len(matched), special)
                )

        chosen: CandidateScore | None = None
        if candidates:
            # Highest score wins; ties break to the lowest input ordinal.
            chosen = max(candidates, key=lambda c: (c.score, -c.ordinal))
            s = solutions[chosen.ordinal]
            pairings.append(
                Pairing(
                    misconception_id=m.id,
                    solution_id=s.solution_id,
                    overlap_score=chosen.score,
                    matched_constructs=m.related_constructs & s.constructs,
                    matched_by_special_case=chosen.special_case,
                )
            )
            used.add(s.solution_id)
            empty_visits = 0
        else:
            empty_visits += 1

        trace.append(
            TraceEvent(
                visit=visit,
                misconception_id=m.id,
                candidates=tuple(candidates),
                chosen_solution_id=chosen.solution_id if chosen else None,
            )
        )
        visit += 1

    return PairingResult(tuple(pairings), tuple(trace), exhausted)


def pairing_report(
    pairings: Sequence[Pairing], misconception_ids: Sequence[str] = ()
) -> dict[str, int]:
    """Pairs per misconception; ids passed explicitly report as zero."""
    counts = {mid: 0 for mid in misconception_ids}
    for p in pairings:
        counts[p.misconception_id] = counts.get(p.misconception_id, 0) + 1
    return counts
