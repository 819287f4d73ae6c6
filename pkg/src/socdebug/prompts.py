"""Prompt assets: generation and evaluation templates with worked examples.

Templates are versioned by content hash; pipeline metadata records the
hash so that every artifact is traceable to the exact prompt that
produced it. Worked examples are original compositions in the same
output grammar the parsers accept.
"""

from __future__ import annotations

import hashlib

from .model import DebugSample


def template_version(*texts: str) -> str:
    """12-hex content hash identifying a prompt template."""
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
    return h.hexdigest()[:12]


# --- Reasoning trajectory generation (2-shot) -------------------------------

RT_TASK = """\
Your Task

You will be given a problem description, buggy code, a failed test case, and a \
student misconception. Your task is to write a reasoning trajectory: a sequence \
of rigorous, deductive reasoning steps that prove a statement contradicting the \
misconception.

Core Principles

1. Strictly deductive: Each step must be a necessary logical consequence of \
previous steps, correct programming language knowledge, and observable facts. \
No abductive inferences or logical leaps.
2. Consistent with misconception: Do not assume programming knowledge that \
contradicts the student's false belief.
3. Focus on disproving misconception: End when reaching a statement that \
contradicts the misconception. Do not show the correct fix.
4. Start from failed test: Begin with observable facts from the failed test \
case and trace program state throughout execution.
5. Sequential labeling: Label steps as A.1, A.2, ..., A.n. Reference \
non-adjacent prior steps when used, e.g. (A.2).

Input Format

<problem>[problem_description]</problem>
<bug_code>[buggy_code]</bug_code>
<failed_test>[failed_test]</failed_test>
<misconception>[misconception]</misconception>

Output Format

Step A.1: [Observable fact(s) from failed test]
...
Step A.k: [Deduced fact(s) using previous steps]
...
Step A.n: [Statement contradicting misconception]
"""

RT_EXAMPLE_1 = """\
Example 1

<problem>Write a function sum_upto(n) that returns the sum of the integers \
from 1 to n inclusive.</problem>
<bug_code>1. def sum_upto(n):
2.     total = 0
3.     for i in range(n):
4.         total += i
5.     return total</bug_code>
<failed_test>When called as sum_upto(3), the function returns 3; whereas the \
expected result is 6.</failed_test>
<misconception>range(n) produces the integers from 1 to n inclusive.</misconception>

Step A.1: The failed test states that sum_upto(3) returns 3. So with n = 3, \
total is 3 after the loop on lines 3-4 finishes.
Step A.2: total starts at 0 on line 2, and each loop iteration on line 4 adds \
the current value of i to total. A loop invariant follows: after every \
iteration, total equals the sum of all values produced so far by range(3). So \
when the loop finishes, total equals the sum of all values produced by range(3).
Step A.3: If range(3) produced the integers from 1 to 3 inclusive, that sum \
would be 1 + 2 + 3 = 6, so total would be 6 when the loop finishes.
Step A.4: But total is 3 when the loop finishes (A.1). Therefore range(3) did \
not produce the integers from 1 to 3 inclusive.
"""

RT_EXAMPLE_2 = """\
Example 2

<problem>Write a function shout(word) that returns the given word in capital \
letters.</problem>
<bug_code>1. def shout(word):
2.     word.upper()
3.     return word</bug_code>
<failed_test>When called as shout("hi"), the function returns 'hi'; whereas \
the expected result is 'HI'.</failed_test>
<misconception>Calling a string method changes the string it is called \
on.</misconception>

Step A.1: The failed test states that shout("hi") returns 'hi'. So with \
word = "hi", the value returned on line 3 is 'hi'.
Step A.2: Line 3 returns the value bound to the name word at that moment. \
Since the returned value is 'hi' (A.1), word is still bound to 'hi' when \
line 3 runs, i.e. after line 2 has already run.
Step A.3: If calling word.upper() on line 2 changed the string bound to word, \
then word would be bound to 'HI' when line 3 runs, and the function would \
return 'HI'.
Step A.4: But the function returns 'hi' (A.1). Therefore calling word.upper() \
on line 2 did not change the string bound to word.
"""

RT_TEMPLATE = RT_TASK + "\n" + RT_EXAMPLE_1 + "\n" + RT_EXAMPLE_2

RT_FORMAT_REMINDER = """\
Reminder: output only the reasoning steps, one per line, labeled sequentially \
starting at Step A.1 with no gaps, in the exact form "Step A.k: [statement]". \
Cite earlier non-adjacent steps in parentheses, e.g. (A.2). Do not add any \
text before Step A.1."""


# --- Socratic conversation generation (1-shot) ------------------------------

SC_TASK = """\
Your Task

You will be given a Reasoning Trajectory (RT), which is a sequence of \
reasoning steps ending with a statement that disproves a student's \
misconception. Your task is to write a Socratic conversation between a Teacher \
and a Student that guides the student to articulate, at each turn, the \
statement proven at that RT step. The Teacher should not provide statements \
directly but ask questions that prompt the student to infer them independently.

Guidelines

- Natural conversation: Teacher utterances should be direct, clear, and \
concise. Avoid phrases like "That's an interesting point" or "Good question."
- Socratic approach: Ask open-ended questions that require reasoning. Do not \
state the inference and ask for confirmation.
- RT correspondence: Each Teacher utterance prompts step A.X, and each Student \
response corresponds to A.X.

Formatting and Structure

- Use Teacher: and Student: as speaker labels, one utterance per turn.
- Conversation begins with Teacher inquiring about the issue; the Student \
then describes the failed test. This opening exchange has no step label.
- End every other Teacher utterance with the label of the RT step it prompts \
in square brackets, e.g. [A.3]. Cover every RT step exactly once, in order.

Input Format

<problem>[problem_description]</problem>
<buggy_code>[buggy_code]</buggy_code>
<failed_test>[failed_test]</failed_test>
<misconception>[misconception]</misconception>
<rt>[reasoning_trajectory]</rt>
"""

SC_EXAMPLE = """\
Example

<problem>Write a function shout(word) that returns the given word in capital \
letters.</problem>
<buggy_code>1. def shout(word):
2.     word.upper()
3.     return word</buggy_code>
<failed_test>When called as shout("hi"), the function returns 'hi'; whereas \
the expected result is 'HI'.</failed_test>
<misconception>Calling a string method changes the string it is called \
on.</misconception>
<rt>Step A.1: The failed test states that shout("hi") returns 'hi'. So with \
word = "hi", the value returned on line 3 is 'hi'.
Step A.2: Line 3 returns the value bound to the name word at that moment. \
Since the returned value is 'hi' (A.1), word is still bound to 'hi' when \
line 3 runs.
Step A.3: If calling word.upper() on line 2 changed the string bound to word, \
then word would be bound to 'HI' when line 3 runs, and the function would \
return 'HI'.
Step A.4: But the function returns 'hi' (A.1). Therefore calling word.upper() \
on line 2 did not change the string bound to word.</rt>

Teacher: What issue are you running into?
Student: My shout function should return the word in capital letters, but the \
failed test says shout("hi") returns 'hi' instead of 'HI'.
Teacher: According to the failed test, what was word equal to, and what value \
did line 3 return? [A.1]
Student: word was "hi", and line 3 returned 'hi'.
Teacher: Line 3 returns whatever the name word is bound to at that moment. \
Given the value it returned, what was word bound to after line 2 ran? [A.2]
Student: Since it returned 'hi', word must still have been bound to 'hi' \
after line 2.
Teacher: Suppose calling word.upper() on line 2 did change the string bound \
to word. What would line 3 return in that case? [A.3]
Student: Then word would be 'HI' on line 3, so the function would return 'HI'.
Teacher: How does that compare with what the function actually returned? [A.4]
Student: It actually returned 'hi', so calling word.upper() cannot have \
changed the string bound to word.
"""

SC_TEMPLATE = SC_TASK + "\n" + SC_EXAMPLE

SC_FORMAT_REMINDER = """\
Reminder: alternate Teacher: and Student: turns, starting with a Teacher \
opening question about the issue (no step label) and a Student description of \
the failure. Every other Teacher utterance must end with the RT step it \
prompts in square brackets, e.g. [A.3], covering each step exactly once, in \
order, each followed by one Student response."""


# --- Failed test description -------------------------------------------------

DESCRIBE_TASK = """\
Your Task

Given a Python problem, buggy code, and execution results, select the simplest \
failing test case and write a concise description of how it fails.

Selection Strategy

1. Syntax errors: If present, all tests fail the same way
2. Runtime errors: Select the test with simplest inputs that raises the error
3. Logical errors: Choose test with most basic arguments (single values, small \
numbers, edge cases)
4. First failing test: If multiple tests fail similarly, choose the first one

Output Format Conventions

- Logical errors: "When called as [function_call], the function returns \
[actual]; whereas the expected result is [expected]."
- Runtime errors: "When called as [function_call], the function raises \
[ErrorType] on line [N]."
- Syntax errors: "When called as [function_call], the function produces a \
SyntaxError on line [N]."

Examples

- When called as double(2), the function returns 2; whereas the expected \
result is 4.
- When called as first_item([]), the function raises IndexError on line 2.
- When called as greet("Ada"), the function produces a SyntaxError on line 1.

Respond with the one-sentence description only.

Input Format

Problem Description: [problem_description]
Buggy Code: [buggy_code]
Execution Results: [execution_results]
"""


# --- LLM-as-judge: reasoning trajectory rubric -------------------------------

JUDGE_RT_TEMPLATE = """\
Your Task

Evaluate whether a reasoning trajectory (RT) serves as a rigorous, logical \
proof by counterexample that contradicts a student misconception. An RT is \
VALID only if it passes all criteria in all three categories below.

Category 1: Logical Soundness

- Valid Starting Point: The RT begins with a verifiable fact taken from the \
failed test case, not from an assumption.
- Deductively Valid: Each step follows necessarily from prior steps, the \
observable facts, and Python semantics. No abduction ("must be", "most \
likely") and no logical leaps that skip a needed intermediate step. Does not \
assume programming knowledge that directly contradicts the misconception: a \
student holding the misconception must be able to accept every premise.
- Sound Contradiction: The trajectory establishes facts that are incompatible \
with the misconception.
- Complete Causal Chain: An unbroken chain of necessity runs from the first \
observation to the final contradiction; every link is proven, not assumed.
- Execution Tracing: The RT traces the program's execution on the concrete \
failed input to deduce concrete facts (values, branches taken, lines reached).

Category 2: Step Construction & Precision

- Clear Boundaries: Each step is one distinct logical unit, not several \
inferences bundled together.
- Precision: Steps reference specific line numbers, variable names, and \
values rather than vague descriptions.
- Proper Citation: Dependencies on non-adjacent earlier steps are cited \
explicitly, e.g. (A.2).
- Technical Accuracy: Every claim about Python constructs and terminology is \
correct per the language's documented behavior.

Category 3: Formatting & Focus

- Sequential Labeling: Steps are labeled A.1, A.2, ... in order with no gaps.
- Focus on Misconception: The RT is exclusively focused on disproving the \
target misconception; it does not digress into fixes or unrelated behavior.

Output Format

Respond with a JSON object of exactly this shape:

{
  "valid": true/false,
  "categories": {
    "logical_soundness": true/false,
    "step_construction_and_precision": true/false,
    "formatting_and_focus": true/false
  },
  "comments": "[Evaluation rationale]",
  "feedback": "[Actionable suggestions or NONE]"
}

"valid" must be true exactly when all three category values are true.
"""


# --- LLM-as-judge: Socratic turn rubric --------------------------------------

JUDGE_TURN_TEMPLATE = """\
Your Task

Evaluate whether a Teacher utterance in a Socratic conversation effectively \
guides a student to articulate the inference from a specific RT step. A \
teacher utterance is VALID only if it satisfies both criteria below.

Criterion 1: Prompts the Correct Inference

The teacher's question must guide the student to articulate the key inference \
from the specific RT step it claims to prompt. The student's response should \
contain the statement proven in that step, and only that step. Questions may \
state facts from previous steps but must prompt the new inference at the \
target step.

Criterion 2: Does Not State the Inference Directly

The teacher must ask a question requiring reasoning. The teacher should not \
provide the answer or state the conclusion. Questions can be general ("What's \
the issue?") or specific, as long as they require the student to think and \
derive the answer rather than merely confirm a stated fact. Rhetorical \
questions that state the inference and merely seek confirmation (for example, \
ending in "right?") fail this criterion.

Evaluation Process

1. Read RT step A.X to understand the target inference
2. Read RT steps A.1 through A.X-1 for established facts
3. Read the teacher utterance and student response
4. Evaluate against both criteria
5. Valid only if both criteria pass

Output Format

Respond with a JSON object of exactly this shape:

{
  "valid": true/false,
  "criteria_scores": {
    "prompts_correct_inference": true/false,
    "does_not_state_inference": true/false
  },
  "comments": "[Evaluation explanation]",
  "feedback": "[Suggestions or NONE]"
}

"valid" must be true exactly when both criterion values are true.
"""


PROMPT_VERSIONS = {
    "rt": template_version(RT_TEMPLATE),
    "sc": template_version(SC_TEMPLATE),
    "describe": template_version(DESCRIBE_TASK),
    "judge_rt": template_version(JUDGE_RT_TEMPLATE),
    "judge_turn": template_version(JUDGE_TURN_TEMPLATE),
}


def sample_input_block(sample: DebugSample, *, bug_tag: str = "bug_code") -> str:
    """Render the tagged input block for a sample.

    RT generation wraps the buggy source in <bug_code>; conversation
    generation uses <buggy_code>.
    """
    return (
        f"<problem>{sample.problem_description}</problem>\n"
        f"<{bug_tag}>{sample.buggy_source}</{bug_tag}>\n"
        f"<failed_test>{sample.failed_test.sentence}</failed_test>\n"
        f"<misconception>{sample.misconception.description}</misconception>"
    )
