from __future__ import annotations

import pytest

from socdebug.conversation import (
    Conversation,
    ConversationGenerationError,
    ConversationParseError,
    Turn,
    build_sc_prompt,
    generate_conversation,
    parse_conversation,
    render_conversation,
)
from socdebug.gateway import Gateway, MockTransport, get_config
from socdebug.prompts import PROMPT_VERSIONS
from socdebug.rt import parse_rt

from .conftest import GEN_CONFIG_ID, RT_TEXTS, SC_TEXTS

TWO_STEP_RT = parse_rt("Step A.1: observed fact\nStep A.2: conclusion (A.1)")

ANNOTATED = """\
Teacher: What issue are you running into?
Student: My function fails one test.
Teacher: What does the failed test report? [A.1]
Student: It reports the observed fact.
Teacher: What follows from that? [A.2]
Student: The conclusion follows."""

UNANNOTATED = """\
Teacher: What issue are you running into?
Student: My function fails one test.
Teacher: What does the failed test report?
Student: It reports the observed fact.
Teacher: What follows from that?
Student: The conclusion follows."""


def test_parse_annotated_transcript_reads_markers():
    conversation = parse_conversation(ANNOTATED, TWO_STEP_RT)
    aligned = [t.aligned_step for t in conversation.turns if t.speaker == "Teacher"]
    assert aligned == [None, "A.1", "A.2"]
    # markers are stripped from the display text
    assert "[A.1]" not in conversation.turns[2].text


def test_parse_unannotated_transcript_assigns_positionally():
    conversation = parse_conversation(UNANNOTATED, TWO_STEP_RT)
    aligned = [t.aligned_step for t in conversation.turns if t.speaker == "Teacher"]
    assert aligned == [None, "A.1", "A.2"]


def test_student_first_rejected():
    text = "Student: help\nTeacher: with what?"
    with pytest.raises(ConversationParseError, match="begin with a Teacher"):
        parse_conversation(text, TWO_STEP_RT)


def test_consecutive_teacher_turns_rejected():
    text = (
        "Teacher: opener?\nStudent: issue.\n"
        "Teacher: first question [A.1]\nTeacher: second question [A.2]\n"
        "Student: answer."
    )
    with pytest.raises(ConversationParseError, match="alternate"):
        parse_conversation(text, TWO_STEP_RT)


def test_missing_alignment_names_the_step():
    rt = parse_rt("Step A.1: a\nStep A.2: b\nStep A.3: c")
    text = (
        "Teacher: opener?\nStudent: issue.\n"
        "Teacher: q1 [A.1]\nStudent: a1.\n"
        "Teacher: q2 [A.2]\nStudent: a2."
    )
    with pytest.raises(ConversationParseError, match=r"A\.3"):
        parse_conversation(text, rt)


def test_duplicate_alignment_rejected():
    text = (
        "Teacher: opener?\nStudent: issue.\n"
        "Teacher: q1 [A.1]\nStudent: a1.\n"
        "Teacher: q2 [A.1]\nStudent: a2."
    )
    with pytest.raises(ConversationParseError, match=r"A\.1"):
        parse_conversation(text, TWO_STEP_RT)


def test_unknown_speaker_label_rejected():
    text = "Teacher: hi\nInstructor: hello"
    with pytest.raises(ConversationParseError, match="Instructor"):
        parse_conversation(text, TWO_STEP_RT)


def test_positional_mode_requires_exact_teacher_count():
    short = "Teacher: opener?\nStudent: issue.\nTeacher: only question\nStudent: answer."
    with pytest.raises(ConversationParseError, match="3 Teacher turns"):
        parse_conversation(short, TWO_STEP_RT)


def test_annotated_opener_must_be_unlabeled():
    text = (
        "Teacher: opener? [A.1]\nStudent: issue.\n"
        "Teacher: q [A.2]\nStudent: a."
    )
    with pytest.raises(ConversationParseError, match="opening Teacher turn"):
        parse_conversation(text, TWO_STEP_RT)


def test_dangling_teacher_turn_rejected():
    text = (
        "Teacher: opener?\nStudent: issue.\n"
        "Teacher: q1 [A.1]\nStudent: a1.\n"
        "Teacher: q2 [A.2]"
    )
    with pytest.raises(ConversationParseError, match="Student response"):
        parse_conversation(text, TWO_STEP_RT)


def test_round_trip_identity_on_fixtures():
    for sample_id, text in SC_TEXTS.items():
        rt = parse_rt(RT_TEXTS[sample_id])
        conversation = parse_conversation(text, rt)
        rendered = render_conversation(conversation, annotations=True)
        assert parse_conversation(rendered, rt) == conversation
        assert rendered == text


def test_plain_rendering_strips_markers():
    conversation = parse_conversation(ANNOTATED, TWO_STEP_RT)
    plain = render_conversation(conversation, annotations=False)
    assert "[A." not in plain
    assert plain.splitlines()[0] == "Teacher: What issue are you running into?"


def test_turn_count_is_twice_steps_plus_opener():
    for sample_id, text in SC_TEXTS.items():
        rt = parse_rt(RT_TEXTS[sample_id])
        conversation = parse_conversation(text, rt)
        assert len(conversation.turns) == 2 * (len(rt.steps) + 1)


def test_conversation_type_invariants():
    with pytest.raises(ValueError, match="begin with a Teacher"):
        Conversation(turns=(Turn("Student", "hi"), Turn("Teacher", "yes")), rt_step_count=0)
    with pytest.raises(ValueError, match="alternate"):
        Conversation(
            turns=(Turn("Teacher", "a"), Turn("Teacher", "b")), rt_step_count=0
        )
    with pytest.raises(ValueError, match="Student turns"):
        Conversation(
            turns=(Turn("Teacher", "a"), Turn("Student", "b", aligned_step="A.1")),
            rt_step_count=1,
        )


# --- prompt -------------------------------------------------------------------------


def test_sc_prompt_contents(corpus):
    sample = corpus[0]
    rt = parse_rt(RT_TEXTS[sample.sample_id])
    prompt = build_sc_prompt(sample, rt)
    assert "<rt>" in prompt and "</rt>" in prompt
    assert "Step A.7" in prompt  # the rendered trajectory is embedded
    assert f"<buggy_code>{sample.buggy_source}</buggy_code>" in prompt
    assert "Do not state the inference and ask for confirmation" in prompt
    assert "That's an interesting point" in prompt  # named as a banned filler phrase


# --- generation ----------------------------------------------------------------------


def test_generate_conversation_via_replay(corpus, replay_gateway):
    sample = corpus[0]
    rt = parse_rt(RT_TEXTS[sample.sample_id])
    conversation = generate_conversation(replay_gateway, sample, rt, get_config(GEN_CONFIG_ID))
    assert len(conversation.turns) == 2 * (len(rt.steps) + 1)
    assert conversation.turns[0].speaker == "Teacher"
    assert conversation.prompt_version == PROMPT_VERSIONS["sc"]
    assert conversation.sample_id == sample.sample_id


def test_generate_conversation_reprompts_once(corpus):
    bad = "Student: I speak first."
    transport = MockTransport({"": [bad, ANNOTATED]})
    gateway = Gateway(transport)
    rt = TWO_STEP_RT
    conversation = generate_conversation(gateway, corpus[0], rt, get_config(GEN_CONFIG_ID))
    assert len(conversation.turns) == 6
    assert len(transport.calls) == 2
    assert "Reminder" in transport.calls[1].prompt


def test_generate_conversation_fails_after_two_bad_outputs(corpus):
    transport = MockTransport({"": ["Student: first", "Student: again"]})
    gateway = Gateway(transport)
    with pytest.raises(ConversationGenerationError):
        generate_conversation(gateway, corpus[0], TWO_STEP_RT, get_config(GEN_CONFIG_ID))
