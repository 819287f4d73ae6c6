"""Aggregate reporting and judge-vs-human agreement.

Shows how per-sample verdicts fold into a benchmark row (total steps,
% valid trajectories, % valid conversations, % grounded turns, rounded
half-up to one decimal) and how agreement rates are computed.
"""

from fractions import Fraction

from socdebug.benchmark import agreement, aggregate, render_report_table
from socdebug.judging import ConversationValidity, RtCategories, RtVerdict
from socdebug.rt import ReasoningTrajectory, RtStep
from socdebug.store import StoredRtVerdict

CONFIG = "gpt-5-low"


def rt_verdict(valid, sample_id):
    return StoredRtVerdict(
        sample_id=sample_id, config_id=CONFIG,
        verdict=RtVerdict(valid=valid, categories=RtCategories(valid, True, True),
                          comments="", feedback="NONE"),
    )


def validity(valid_turns, total_turns):
    return ConversationValidity(
        conversation_valid=valid_turns == total_turns,
        grounded_fraction=Fraction(valid_turns, total_turns),
        valid_turns=valid_turns, total_turns=total_turns,
    )


def trajectory(n, sample_id):
    return ReasoningTrajectory(
        steps=tuple(RtStep(f"A.{k}", f"step {k}") for k in range(1, n + 1)),
        sample_id=sample_id, config_id=CONFIG,
    )


# %% Three conversations: 3/3, 2/3, 3/3 grounded turns.

rows = [
    aggregate(
        CONFIG,
        [rt_verdict(True, f"s{i}") for i in range(3)],
        [validity(3, 3), validity(2, 3), validity(3, 3)],
        [trajectory(3, f"s{i}") for i in range(3)],
    )
]
print(render_report_table(rows))
print("\n2 of 3 conversations fully grounded -> 66.7%; 8 of 9 turns -> 88.9%")

# %% Generation failures count as invalid with the denominator held fixed.

partial = aggregate(
    CONFIG,
    [rt_verdict(True, "s0")],
    [validity(3, 3)],
    [trajectory(3, "s0")],
    total_samples=2,  # one sample failed to generate
)
print(f"\nwith one failed sample: {partial.pct_valid_rts}% valid trajectories")

# %% Agreement between the judge and a human rater.

judge = {f"item-{k}": True for k in range(30)}
human = {k: (False if int(k.split('-')[1]) < 7 else True) for k in judge}
report = agreement(judge, human)
print(f"\ntrajectory agreement: {report.rate}% ({report.matches}/{report.n})")

judge = {f"turn-{k}": True for k in range(88)}
human = {k: (False if int(k.split('-')[1]) < 3 else True) for k in judge}
report = agreement(judge, human)
print(f"turn agreement: {report.rate}% ({report.matches}/{report.n})")
