/**
 * Session state for one instructor help session: the four input texts,
 * the selected model, the latest results, and the in-session history of
 * earlier generations (retained when the instructor switches models and
 * regenerates).
 */

import type { ConversationResponse, RtResponse, SamplePayload } from "./api.js";

export interface SessionDraft {
  problem: string;
  bugCode: string;
  failedTest: string;
  misconception: string;
  configId: string;
}

export interface GenerationResult {
  configId: string;
  rt: RtResponse;
  conversation: ConversationResponse;
}

export function emptyDraft(): SessionDraft {
  return { problem: "", bugCode: "", failedTest: "", misconception: "", configId: "" };
}

export class Session {
  draft: SessionDraft = emptyDraft();
  current: GenerationResult | null = null;
  readonly history: GenerationResult[] = [];

  /** Generation is enabled only once all four inputs are non-empty. */
  canGenerate(): boolean {
    const d = this.draft;
    return (
      d.problem.trim() !== "" &&
      d.bugCode.trim() !== "" &&
      d.failedTest.trim() !== "" &&
      d.misconception.trim() !== "" &&
      d.configId !== ""
    );
  }

  samplePayload(): SamplePayload {
    return {
      problem: this.draft.problem,
      bug_code: this.draft.bugCode,
      failed_test: this.draft.failedTest,
      misconception: this.draft.misconception,
      sample_id: "interactive",
    };
  }

  /** New results replace the current view; older ones stay in history. */
  record(result: GenerationResult): void {
    this.current = result;
    this.history.push(result);
  }
}
