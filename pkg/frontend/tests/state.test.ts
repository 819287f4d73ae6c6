import { describe, expect, it } from "vitest";

import { Session } from "../src/state.js";
import { CONVERSATION_RESPONSE, RT_RESPONSE, SAMPLE } from "./fixtures.js";

function completedDraft(session: Session): void {
  session.draft.problem = SAMPLE.problem;
  session.draft.bugCode = SAMPLE.bug_code;
  session.draft.failedTest = SAMPLE.failed_test;
  session.draft.misconception = SAMPLE.misconception;
  session.draft.configId = "gpt-5-low";
}

describe("session state", () => {
  it("disables generation until all four inputs are non-empty", () => {
    const session = new Session();
    expect(session.canGenerate()).toBe(false);
    completedDraft(session);
    expect(session.canGenerate()).toBe(true);
    for (const key of ["problem", "bugCode", "failedTest", "misconception"] as const) {
      const saved = session.draft[key];
      session.draft[key] = "   ";
      expect(session.canGenerate()).toBe(false);
      session.draft[key] = saved;
    }
  });

  it("requires a selected model", () => {
    const session = new Session();
    completedDraft(session);
    session.draft.configId = "";
    expect(session.canGenerate()).toBe(false);
  });

  it("maps the draft onto the sample payload field names", () => {
    const session = new Session();
    completedDraft(session);
    expect(session.samplePayload()).toEqual({ ...SAMPLE, sample_id: "interactive" });
  });

  it("replaces current results but retains history", () => {
    const session = new Session();
    const first = { configId: "gpt-5-low", rt: RT_RESPONSE, conversation: CONVERSATION_RESPONSE };
    const second = { ...first, configId: "claude-sonnet-4-5-thinking" };
    session.record(first);
    session.record(second);
    expect(session.current).toBe(second);
    expect(session.history).toEqual([first, second]);
  });
});
