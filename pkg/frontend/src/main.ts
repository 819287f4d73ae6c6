/**
 * Instructor tool: enter the problem, buggy code, failed-test
 * description, and misconception; pick a model; generate and read the
 * reasoning trajectory and the Socratic conversation, with the model's
 * deliberation behind expanders. Talks only to the generation service.
 */

import { ServiceClient, ServiceError } from "./api.js";
import type { ErrorBody } from "./api.js";
import {
  defaultConfig,
  isReasoningConfig,
  supportsReasoningToggle,
  withReasoning,
} from "./registry.js";
import { renderConversation, renderError, renderSteps, renderTrace } from "./render.js";
import { Session } from "./state.js";

export interface AppHandles {
  session: Session;
  ready: Promise<void>;
  generate: () => Promise<void>;
  refreshControls: () => void;
}

const FAILED_TEST_PLACEHOLDER =
  "When called as calculate_average(1, 3), the function returns 2.5; " +
  "whereas the expected result is 2.0.";

export function mountApp(root: HTMLElement, client: ServiceClient): AppHandles {
  const session = new Session();
  root.innerHTML = `
    <header>
      <h1>Socratic debugging planner</h1>
      <p class="tagline">From buggy code to a reasoning trajectory and a Socratic conversation.</p>
    </header>
    <section class="inputs">
      <label>Problem description
        <textarea id="problem" rows="3"></textarea></label>
      <label>Buggy student code
        <textarea id="bug-code" rows="8" spellcheck="false"></textarea></label>
      <label>Failed test description
        <textarea id="failed-test" rows="2" placeholder="${FAILED_TEST_PLACEHOLDER}"></textarea></label>
      <label>Student misconception
        <textarea id="misconception" rows="2"></textarea></label>
      <div class="controls">
        <label>Model
          <select id="model-picker" disabled></select></label>
        <label class="toggle">
          <input type="checkbox" id="reasoning-toggle" checked> Reasoning</label>
        <button id="generate" type="button" disabled>Generate</button>
        <span id="status" class="status"></span>
      </div>
      <p id="picker-notice" class="notice" hidden></p>
    </section>
    <section id="error-slot"></section>
    <section class="results" hidden>
      <div class="panel">
        <h2>Reasoning trajectory</h2>
        <div id="rt-panel"></div>
        <div id="rt-trace"></div>
      </div>
      <div class="panel">
        <h2>Socratic conversation</h2>
        <div id="conversation-panel"></div>
        <div id="conversation-trace"></div>
      </div>
    </section>
    <section class="history">
      <h2>Session history</h2>
      <ul id="history-list"></ul>
    </section>
  `;

  const field = (id: string) => root.querySelector(`#${id}`) as HTMLTextAreaElement;
  const problem = field("problem");
  const bugCode = field("bug-code");
  const failedTest = field("failed-test");
  const misconception = field("misconception");
  const picker = root.querySelector("#model-picker") as HTMLSelectElement;
  const toggle = root.querySelector("#reasoning-toggle") as HTMLInputElement;
  const generateButton = root.querySelector("#generate") as HTMLButtonElement;
  const status = root.querySelector("#status") as HTMLSpanElement;
  const notice = root.querySelector("#picker-notice") as HTMLParagraphElement;
  const errorSlot = root.querySelector("#error-slot") as HTMLElement;
  const results = root.querySelector(".results") as HTMLElement;
  const historyList = root.querySelector("#history-list") as HTMLUListElement;

  let availableModels: string[] = [];

  function syncDraft(): void {
    session.draft.problem = problem.value;
    session.draft.bugCode = bugCode.value;
    session.draft.failedTest = failedTest.value;
    session.draft.misconception = misconception.value;
    session.draft.configId = picker.value;
  }

  function refreshControls(): void {
    syncDraft();
    generateButton.disabled = !session.canGenerate();
    toggle.checked = isReasoningConfig(picker.value);
    toggle.disabled = !supportsReasoningToggle(picker.value) || picker.disabled;
  }

  function showResults(): void {
    const current = session.current;
    if (!current) return;
    results.hidden = false;
    const rtPanel = root.querySelector("#rt-panel") as HTMLElement;
    const rtTrace = root.querySelector("#rt-trace") as HTMLElement;
    const convPanel = root.querySelector("#conversation-panel") as HTMLElement;
    const convTrace = root.querySelector("#conversation-trace") as HTMLElement;
    rtPanel.replaceChildren(renderSteps(current.rt.steps));
    rtTrace.replaceChildren(renderTrace(current.rt.reasoning_trace, "Model reasoning (trajectory)"));
    convPanel.replaceChildren(renderConversation(current.conversation.turns));
    convTrace.replaceChildren(
      renderTrace(current.conversation.reasoning_trace, "Model reasoning (conversation)"),
    );
    historyList.replaceChildren(
      ...session.history.map((entry, index) => {
        const item = document.createElement("li");
        item.textContent =
          `#${index + 1} ${entry.configId}: ${entry.rt.steps.length} steps, ` +
          `${entry.conversation.turns.length} turns`;
        return item;
      }),
    );
  }

  function showError(error: ErrorBody): void {
    errorSlot.replaceChildren(renderError(error, () => void generate()));
  }

  async function generate(): Promise<void> {
    syncDraft();
    if (!session.canGenerate()) return;
    errorSlot.replaceChildren();
    generateButton.disabled = true;
    status.textContent = "generating…";
    const configId = session.draft.configId;
    try {
      const sample = session.samplePayload();
      const rt = await client.generateRt(sample, configId);
      const conversation = await client.generateConversation(
        sample,
        rt.steps.map((s) => ({ label: s.label, text: s.text })),
        configId,
      );
      session.record({ configId, rt, conversation });
      showResults();
      status.textContent = `done (${configId})`;
    } catch (error) {
      // Inputs are left untouched so a retry needs no re-typing.
      const body: ErrorBody =
        error instanceof ServiceError
          ? { code: error.code, message: error.message, detail: error.detail }
          : { code: "network_error", message: String(error), detail: "" };
      showError(body);
      status.textContent = "failed";
    } finally {
      refreshControls();
    }
  }

  const ready = (async () => {
    try {
      availableModels = await client.listModels();
      picker.replaceChildren(
        ...availableModels.map((id) => {
          const option = document.createElement("option");
          option.value = id;
          option.textContent = id;
          return option;
        }),
      );
      picker.disabled = false;
      picker.value = defaultConfig(availableModels); // reasoning on by default
    } catch {
      picker.disabled = true;
      notice.hidden = false;
      notice.textContent = "Model list unavailable: the generation service is offline.";
    }
    refreshControls();
  })();

  for (const input of [problem, bugCode, failedTest, misconception]) {
    input.addEventListener("input", refreshControls);
  }
  picker.addEventListener("change", refreshControls);
  toggle.addEventListener("change", () => {
    picker.value = withReasoning(picker.value, toggle.checked, availableModels);
    refreshControls();
  });
  generateButton.addEventListener("click", () => void generate());

  return { session, ready, generate, refreshControls };
}

declare global {
  interface Window {
    socdebugApp?: AppHandles;
  }
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  window.socdebugApp = mountApp(rootElement, new ServiceClient(""));
}
