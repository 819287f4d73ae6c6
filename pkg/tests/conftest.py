"""Shared fixtures: buggy programs, a five-sample corpus, canned model
outputs, and replay cassettes built from them.

The canned texts are frozen test data; request hashes are computed
through the library so cassettes stay valid as prompts evolve.
"""

from __future__ import annotations

import pytest

from socdebug.conversation import parse_conversation
from socdebug.execution import render_convention
from socdebug.gateway import Cassette, Gateway, GenerationRequest, ReplayTransport
from socdebug.judging import build_judge_rt_prompt, build_judge_turn_prompt
from socdebug.model import DebugSample, FailedTestDescription, Misconception, TestCase
from socdebug.rt import build_rt_prompt, parse_rt
from socdebug.conversation import build_sc_prompt

# --- buggy programs ----------------------------------------------------------

CALCULATE_AVERAGE_SRC = """\
def calculate_average(x, y):
    return x + y / 2
"""

TOP_K_SRC = """\
def top_k(lst, k):
    result = []
    for i in range(k):
        result.append(max(lst))
        lst.pop(max(lst))
    return result
"""

COUNT_WORDS_SRC = """\
def count_words(sentence):
    words = 0
    space_mode = True
    for i in range(1, len(sentence)):
        if sentence[i] == ' ':
            if not space_mode:
                words += 1
            space_mode = True
        else:
            space_mode = False
    if not space_mode:
        words += 1
    return words
"""

IS_PALINDROME_SRC = """\
def is_palindrome(string):
    rev_string = ''
    for i in string:
        rev_string = i + rev_string
    if rev_string = string:
        return True
    else:
        return False
"""

VOWEL_REPLACE_SRC = """\
def toxNGLXSH(sen):
    vowels = ["a"]
    for i in vowels:
        if i.islower():
            sen.replace(i, "x")
        else:
            sen.replace(i, "X")
    return sen
"""


def _failed(kind, call, **kw) -> FailedTestDescription:
    base = FailedTestDescription(kind=kind, call_expression=call, sentence="-", **kw)
    return FailedTestDescription(
        kind=kind, call_expression=call, sentence=render_convention(base), **kw
    )


def make_corpus() -> list[DebugSample]:
    """The five-sample replay corpus built from the fixture programs."""
    return [
        DebugSample(
            sample_id="calculate-average",
            problem_description="Write a function calculate_average(x, y) that returns the average of two numbers.",
            buggy_source=CALCULATE_AVERAGE_SRC,
            failed_test=_failed("logical", "calculate_average(1, 3)", actual="2.5", expected="2.0"),
            misconception=Misconception(
                id="mc-plus-div",
                description="The + operator has higher precedence than /.",
                related_constructs=frozenset({"operator +", "operator /", "combo + /"}),
                special_case_id="plus-div-precedence",
            ),
        ),
        DebugSample(
            sample_id="top-k",
            problem_description="Write a function top_k(lst, k) that returns the k largest elements of the list.",
            buggy_source=TOP_K_SRC,
            failed_test=_failed("runtime", "top_k([1, 2, 3, 4, 5], 1)", error_type="IndexError", line=5),
            misconception=Misconception(
                id="mc-pop-value",
                description="The list.pop() method takes the value to be deleted from the list.",
                related_constructs=frozenset({"list.pop"}),
            ),
        ),
        DebugSample(
            sample_id="count-words",
            problem_description="Write a function count_words(sentence) that returns the number of words in the sentence.",
            buggy_source=COUNT_WORDS_SRC,
            failed_test=_failed("logical", 'count_words("I love Python")', actual="2", expected="3"),
            misconception=Misconception(
                id="mc-index-one",
                description="String indexing starts at 1.",
                related_constructs=frozenset({"indexing", "range"}),
            ),
        ),
        DebugSample(
            sample_id="is-palindrome",
            problem_description="Write a function is_palindrome(string) that returns True if the string is a palindrome.",
            buggy_source=IS_PALINDROME_SRC,
            failed_test=_failed("syntax", 'is_palindrome("racecar")', line=5),
            misconception=Misconception(
                id="mc-assign-eq",
                description="The = operator is used for equality comparison.",
                related_constructs=frozenset({"operator =="}),
                special_case_id="assignment-in-condition",
            ),
        ),
        DebugSample(
            sample_id="vowel-replace",
            problem_description="Write a function toxNGLXSH(sen) that replaces every lowercase vowel in the sentence with x.",
            buggy_source=VOWEL_REPLACE_SRC,
            failed_test=_failed("logical", 'toxNGLXSH("a")', actual="'a'", expected="'x'"),
            misconception=Misconception(
                id="mc-replace-inplace",
                description="str.replace() modifies the string in place.",
                related_constructs=frozenset({"str.replace"}),
            ),
        ),
    ]


# --- canned model outputs ------------------------------------------------------

RT_TEXTS = {
    "calculate-average": """\
Step A.1: The failed test states that calculate_average(1, 3) returns 2.5. So with x = 1 and y = 3, the expression on line 2, x + y / 2, evaluates to 2.5.
Step A.2: There are no parentheses on line 2, so the only two possible groupings of x + y / 2 are (x + y) / 2 and x + (y / 2).
Step A.3: Assume the misconception is true: + is evaluated before /. Then line 2 would be grouped as (x + y) / 2.
Step A.4: Compute (x + y) / 2 with x = 1 and y = 3: (1 + 3) / 2 = 4 / 2 = 2.0.
Step A.5: So if + were evaluated before /, the call calculate_average(1, 3) would return 2.0 (A.3, A.4).
Step A.6: But the call actually returns 2.5 (A.1).
Step A.7: Therefore + is not evaluated before / on line 2, so + does not have higher precedence than /.""",
    # Deliberately states how pop() really works: grammar-valid, semantically
    # invalid under the rubric's contradiction rule.
    "top-k": """\
Step A.1: The failed test states that top_k([1, 2, 3, 4, 5], 1) raises an IndexError on line 5. So with lst = [1, 2, 3, 4, 5] and k = 1, execution reaches line 5.
Step A.2: On line 4, max(lst) is 5, so result becomes [5]; on line 5 the call evaluated is lst.pop(5).
Step A.3: In Python, list.pop(i) removes and returns the item at index i; if i is outside the valid index range, it raises IndexError.
Step A.4: The list [1, 2, 3, 4, 5] has valid indices 0 through 4, so index 5 is out of range (A.2).
Step A.5: Therefore the IndexError on line 5 means the argument 5 was used as an index, not as a value to delete.""",
    "count-words": """\
Step A.1: The failed test states that count_words("I love Python") returns 2; the expected result is 3.
Step A.2: Line 4 loops i over range(1, len(sentence)), and len("I love Python") is 13, so the loop visits exactly the positions produced by range(1, 13).
Step A.3: If string indexing started at 1, position 1 would be the first character 'I', and every character of the sentence would be visited, so all 3 words would be counted.
Step A.4: But the function returns 2 (A.1), so the loop did not visit the first character; therefore string indexing does not start at 1.""",
    "is-palindrome": """\
Step A.1: The failed test states that is_palindrome("racecar") produces a SyntaxError on line 5, so the program never runs.
Step A.2: Line 5 is the statement 'if rev_string = string:', and the SyntaxError points at the = between rev_string and string.
Step A.3: If = were the equality comparison operator, then rev_string = string would be a valid comparison expression, and placing it after if would be grammatically correct Python that the interpreter accepts.
Step A.4: But the interpreter rejects line 5 with a SyntaxError (A.1, A.2); therefore = is not the operator Python uses for equality comparison.""",
    "vowel-replace": """\
Step A.1: The failed test states that toxNGLXSH("a") returns 'a'; the expected result is 'x'. So with sen = "a", the value returned on line 8 is 'a'.
Step A.2: The loop on line 3 runs exactly once with i = 'a', and since 'a'.islower() is True, line 5 executes: sen.replace(i, "x").
Step A.3: If calling sen.replace('a', 'x') on line 5 modified sen in place, then sen would be 'x' on line 8, and the function would return 'x' (A.2).
Step A.4: But the function returns 'a' (A.1); therefore sen.replace() did not modify the string in place.""",
}

SC_TEXTS = {
    "calculate-average": """\
Teacher: What seems to be the problem?
Student: My calculate_average function returns 2.5 for calculate_average(1, 3), but the expected result is 2.0.
Teacher: Given the failed test, what does the expression on line 2 evaluate to, and with which values of x and y? [A.1]
Student: With x = 1 and y = 3, the expression x + y / 2 on line 2 evaluates to 2.5.
Teacher: Line 2 has no parentheses. Which groupings of x + y / 2 are possible? [A.2]
Student: Only two: (x + y) / 2 or x + (y / 2).
Teacher: Suppose + really is evaluated before /. How would line 2 be grouped then? [A.3]
Student: It would be grouped as (x + y) / 2.
Teacher: What value does that grouping give with x = 1 and y = 3? [A.4]
Student: (1 + 3) / 2 is 4 / 2, which is 2.0.
Teacher: So what would the call return if + were evaluated first? [A.5]
Student: It would return 2.0.
Teacher: What did the call actually return? [A.6]
Student: It returned 2.5.
Teacher: What does that tell you about the assumption that + is evaluated before /? [A.7]
Student: The assumption must be false, so + does not have higher precedence than /.""",
    "top-k": """\
Teacher: What issue are you running into?
Student: My top_k function raises an IndexError on line 5 when I call top_k([1, 2, 3, 4, 5], 1).
Teacher: What does the failed test tell you about the program state when line 5 runs? [A.1]
Student: With lst = [1, 2, 3, 4, 5] and k = 1, execution reaches line 5 and raises IndexError there.
Teacher: Trace lines 4 and 5: which call is actually evaluated on line 5? [A.2]
Student: max(lst) is 5, so result becomes [5] and line 5 evaluates lst.pop(5).
Teacher: What does list.pop(i) do with its argument in Python? [A.3]
Student: It removes and returns the item at index i, raising IndexError if i is out of range.
Teacher: Which indices are valid for [1, 2, 3, 4, 5]? [A.4]
Student: Indices 0 through 4, so 5 is out of range.
Teacher: So how was the argument 5 interpreted on line 5? [A.5]
Student: It was used as an index, not as a value to delete.""",
    "count-words": """\
Teacher: What issue are you encountering?
Student: count_words("I love Python") returns 2, but there are 3 words.
Teacher: What does the failed test report, exactly? [A.1]
Student: The function returns 2, whereas the expected result is 3.
Teacher: Which positions does the loop on line 4 visit for this sentence? [A.2]
Student: len("I love Python") is 13, so i takes the values produced by range(1, 13).
Teacher: The answer is that all three words would be counted if indexing started at 1, since position 1 would be the first character, right? [A.3]
Student: Yes, if position 1 were 'I', every character would be visited and all 3 words counted.
Teacher: Given the actual return value, what follows about where string indexing starts? [A.4]
Student: The count is 2, so the first character was never visited; indexing cannot start at 1.""",
    "is-palindrome": """\
Teacher: What happens when you run your function?
Student: is_palindrome("racecar") produces a SyntaxError on line 5, so nothing runs.
Teacher: Where exactly does the interpreter point when it reports the error? [A.1]
Student: At line 5, before the program ever executes.
Teacher: What is on line 5, and which symbol does the error point at? [A.2]
Student: The statement 'if rev_string = string:', and the error points at the = sign.
Teacher: Suppose = really were the equality comparison operator. How would the interpreter treat line 5 in that case? [A.3]
Student: Then rev_string = string would be a valid comparison and the if statement would be grammatically correct, so it would be accepted.
Teacher: How does that square with what the interpreter actually did? [A.4]
Student: It rejected the line with a SyntaxError, so = cannot be Python's equality comparison operator.""",
    "vowel-replace": """\
Teacher: What problem are you seeing?
Student: toxNGLXSH("a") returns 'a' instead of 'x'.
Teacher: What does the failed test say the function returned on line 8? [A.1]
Student: With sen = "a", the function returned 'a'.
Teacher: Walk through the loop: which line executes, and with what call? [A.2]
Student: The loop runs once with i = 'a'; since 'a'.islower() is True, line 5 runs sen.replace(i, "x").
Teacher: If that call modified sen in place, what would the function return? [A.3]
Student: sen would become 'x', so it would return 'x'.
Teacher: Compare that with the actual result. What do you conclude? [A.4]
Student: It returned 'a', so sen.replace() did not modify the string in place.""",
}

_VALID_RT_VERDICT = """\
{
  "valid": true,
  "categories": {
    "logical_soundness": true,
    "step_construction_and_precision": true,
    "formatting_and_focus": true
  },
  "comments": "Deductive chain from the failed test to the contradiction.",
  "feedback": "NONE"
}"""

_INVALID_TOP_K_VERDICT = """\
{
  "valid": false,
  "categories": {
    "logical_soundness": false,
    "step_construction_and_precision": true,
    "formatting_and_focus": true
  },
  "comments": "Step A.3 states how list.pop() actually works.",
  "feedback": "Does not assume programming knowledge that directly contradicts the misconception: prove that interpreting the argument as a value leads to a contradiction instead of stating pop()'s real behavior."
}"""

RT_VERDICTS = {
    "calculate-average": _VALID_RT_VERDICT,
    "top-k": _INVALID_TOP_K_VERDICT,
    "count-words": _VALID_RT_VERDICT,
    "is-palindrome": _VALID_RT_VERDICT,
    "vowel-replace": _VALID_RT_VERDICT,
}

_VALID_TURN_VERDICT = """\
{
  "valid": true,
  "criteria_scores": {
    "prompts_correct_inference": true,
    "does_not_state_inference": true
  },
  "comments": "Asks for the step's inference without revealing it.",
  "feedback": "NONE"
}"""

_INVALID_TURN_VERDICT = """\
{
  "valid": false,
  "criteria_scores": {
    "prompts_correct_inference": true,
    "does_not_state_inference": false
  },
  "comments": "Rhetorical question: states the conclusion and asks for confirmation.",
  "feedback": "Ask the student to derive what would happen if indexing started at 1 instead of stating it."
}"""

# The count-words A.3 teacher turn is a rhetorical "..., right?" question.
INVALID_TURNS = {("count-words", "A.3")}

GEN_CONFIG_ID = "gpt-5-low"
JUDGE_CONFIG_ID = "judge-claude-sonnet-4-5-thinking"


def build_corpus_cassette(
    samples: list[DebugSample],
    config_id: str = GEN_CONFIG_ID,
    judge_config_id: str = JUDGE_CONFIG_ID,
) -> Cassette:
    """Record every request the pipeline will make for the corpus."""
    cassette = Cassette()
    for sample in samples:
        rt_text = RT_TEXTS[sample.sample_id]
        cassette.add(
            GenerationRequest(prompt=build_rt_prompt(sample), config_id=config_id),
            rt_text,
            reasoning="recorded deliberation trace",
        )
        rt = parse_rt(rt_text)
        sc_text = SC_TEXTS[sample.sample_id]
        cassette.add(
            GenerationRequest(prompt=build_sc_prompt(sample, rt), config_id=config_id),
            sc_text,
        )
        conversation = parse_conversation(sc_text, rt)
        cassette.add(
            GenerationRequest(
                prompt=build_judge_rt_prompt(sample, rt), config_id=judge_config_id
            ),
            RT_VERDICTS[sample.sample_id],
        )
        for index, turn in conversation.aligned_teacher_turns:
            student = conversation.turns[index + 1]
            verdict = (
                _INVALID_TURN_VERDICT
                if (sample.sample_id, turn.aligned_step) in INVALID_TURNS
                else _VALID_TURN_VERDICT
            )
            cassette.add(
                GenerationRequest(
                    prompt=build_judge_turn_prompt(
                        sample, rt, turn.text, student.text, turn.aligned_step or ""
                    ),
                    config_id=judge_config_id,
                ),
                verdict,
            )
    return cassette


@pytest.fixture()
def corpus() -> list[DebugSample]:
    return make_corpus()


@pytest.fixture()
def replay_gateway(corpus) -> Gateway:
    return Gateway(ReplayTransport(build_corpus_cassette(corpus)))


@pytest.fixture()
def cassette_path(tmp_path, corpus):
    path = tmp_path / "cassette.jsonl"
    build_corpus_cassette(corpus).save(path)
    return path


def solution_tests(sample_id: str) -> list[TestCase]:
    """Unit tests for the fixture programs (first test is the described one)."""
    table = {
        "calculate-average": [
            ("calculate_average(1, 3)", "2.0"),
            ("calculate_average(10, 30)", "20.0"),
        ],
        "top-k": [
            ("top_k([1, 2, 3, 4, 5], 1)", "[5]"),
            ("top_k([7, 7], 2)", "[7, 7]"),
        ],
        "count-words": [
            ('count_words("I love Python")', "3"),
            ('count_words("hi")', "1"),
        ],
        "is-palindrome": [
            ('is_palindrome("racecar")', "True"),
            ('is_palindrome("abc")', "False"),
        ],
        "vowel-replace": [
            ('toxNGLXSH("a")', "'x'"),
            ('toxNGLXSH("bcd")', "'bcd'"),
        ],
    }
    return [
        TestCase(call_expression=call, expected_value=expected, ordinal=i)
        for i, (call, expected) in enumerate(table[sample_id], start=1)
    ]
