"""Trajectory generation, Socratic conversation, and judging, offline.

Uses a scripted mock transport so the whole walk-through runs without
credentials; swap in `Gateway.live()` (with provider API keys in the
environment) or `Gateway.replay(cassette)` for real runs.
"""

from socdebug.conversation import generate_conversation, render_conversation
from socdebug.execution import render_convention
from socdebug.gateway import Gateway, MockTransport, get_config
from socdebug.judging import conversation_validity, judge_rt, judge_turn
from socdebug.model import DebugSample, FailedTestDescription, Misconception
from socdebug.rt import generate_rt, render_rt

# %% The four-part input: problem, buggy code, failed test, misconception.

failed = FailedTestDescription(
    kind="logical", call_expression="shout('hi')", actual="'hi'", expected="'HI'",
    sentence="-",
)
failed = FailedTestDescription(
    kind="logical", call_expression="shout('hi')", actual="'hi'", expected="'HI'",
    sentence=render_convention(failed),
)
sample = DebugSample(
    sample_id="shout",
    problem_description="Write a function shout(word) that returns the word in capitals.",
    buggy_source="def shout(word):\n    word.upper()\n    return word\n",
    failed_test=failed,
    misconception=Misconception(
        id="mc-method-mutates",
        description="Calling a string method changes the string it is called on.",
        related_constructs=frozenset({"str.upper"}),
    ),
)

# %% Scripted responses stand in for the model.

RT_TEXT = """\
Step A.1: The failed test states that shout('hi') returns 'hi'. So with word = "hi", line 3 returns 'hi'.
Step A.2: Line 3 returns whatever word is bound to after line 2 has run, so word is still bound to 'hi' there (A.1).
Step A.3: If word.upper() on line 2 changed the string bound to word, line 3 would return 'HI'.
Step A.4: But the function returns 'hi' (A.1); therefore word.upper() did not change the string bound to word."""

SC_TEXT = """\
Teacher: What issue are you running into?
Student: shout('hi') returns 'hi' instead of 'HI'.
Teacher: What does the failed test say line 3 returned, and what was word? [A.1]
Student: word was "hi" and line 3 returned 'hi'.
Teacher: Line 3 returns whatever word is bound to. What was word bound to after line 2? [A.2]
Student: Still 'hi', since that is what was returned.
Teacher: Suppose word.upper() did change the string bound to word. What would line 3 return? [A.3]
Student: It would return 'HI'.
Teacher: How does that compare with the actual return value? [A.4]
Student: It returned 'hi', so word.upper() cannot have changed the string."""

RT_VERDICT = """\
{"valid": true,
 "categories": {"logical_soundness": true,
                "step_construction_and_precision": true,
                "formatting_and_focus": true},
 "comments": "Counterexample proof grounded in the failed test.",
 "feedback": "NONE"}"""

TURN_VERDICT = """\
{"valid": true,
 "criteria_scores": {"prompts_correct_inference": true,
                     "does_not_state_inference": true},
 "comments": "Asks for the inference without stating it.",
 "feedback": "NONE"}"""

gateway = Gateway(MockTransport({"": [RT_TEXT, SC_TEXT, RT_VERDICT] + [TURN_VERDICT] * 4}))
config = get_config("gpt-5-low")
judge_config = get_config("judge-claude-sonnet-4-5-thinking")

# %% Generate the trajectory: the last step contradicts the misconception.

rt = generate_rt(gateway, sample, config)
print(render_rt(rt))

# %% Generate the conversation anchored on it: opener + one exchange per step.

conversation = generate_conversation(gateway, sample, rt, config)
print()
print(render_conversation(conversation, annotations=False))
print(f"\n{len(conversation.turns)} turns = 2 x ({len(rt.steps)} steps + opener)")

# %% Judge the trajectory and every stepped teacher turn.

verdict = judge_rt(gateway, sample, rt, judge_config)
print("\ntrajectory valid:", verdict.valid)

turn_verdicts = [
    judge_turn(gateway, sample, rt, conversation, index, judge_config)
    for index, _turn in conversation.aligned_teacher_turns
]
validity = conversation_validity(turn_verdicts)
print("conversation valid:", validity.conversation_valid,
      f"({validity.valid_turns}/{validity.total_turns} turns grounded)")
