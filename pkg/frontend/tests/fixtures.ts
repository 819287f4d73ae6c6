/** Recorded responses from the replay-mode service (see tests/fixtures/). */

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

function load<T>(name: string): T {
  // vitest runs with cwd = frontend/; happy-dom rewrites import.meta.url
  const path = resolve(process.cwd(), "tests", "fixtures", name);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

import type {
  ConversationResponse,
  ErrorBody,
  RtResponse,
  SamplePayload,
} from "../src/api.js";

export const MODELS = load<{ models: string[] }>("models.json");
export const RT_RESPONSE = load<RtResponse>("generate_rt.json");
export const CONVERSATION_RESPONSE = load<ConversationResponse>("generate_conversation.json");
export const SAMPLE = load<SamplePayload>("sample.json");
export const INVALID_FAILED_TEST_ERROR = load<ErrorBody>("error_invalid_failed_test.json");
