/**
 * DOM renderers. Each takes an API response fragment and returns an
 * element; nothing here re-derives pipeline content, so snapshot tests
 * against recorded API fixtures pin the output exactly.
 */

import type { ConversationTurn, ErrorBody, RtStep } from "./api.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Numbered trajectory: one list item per step, labels shown verbatim. */
export function renderSteps(steps: RtStep[]): HTMLOListElement {
  const list = el("ol", "rt-steps");
  for (const step of steps) {
    const item = el("li", "rt-step");
    item.dataset.label = step.label;
    item.append(el("span", "step-label", step.label));
    item.append(el("span", "step-text", step.text));
    if (step.cites.length > 0) {
      item.append(el("span", "step-cites", `cites ${step.cites.join(", ")}`));
    }
    list.append(item);
  }
  return list;
}

/**
 * Alternating speaker bubbles. Step annotations are not part of the turn
 * text (the service strips them); the aligned label is shown as a badge
 * revealed on hover, plus a title for accessibility.
 */
export function renderConversation(turns: ConversationTurn[]): HTMLDivElement {
  const box = el("div", "conversation");
  for (const turn of turns) {
    const bubble = el("div", `turn ${turn.speaker.toLowerCase()}`);
    bubble.append(el("span", "speaker", turn.speaker));
    bubble.append(el("span", "turn-text", turn.text));
    if (turn.step) {
      bubble.title = `prompts step ${turn.step}`;
      bubble.append(el("span", "step-badge", turn.step));
    }
    box.append(bubble);
  }
  return box;
}

/** Reasoning traces live behind an expander and default to collapsed. */
export function renderTrace(trace: string | null, label: string): HTMLElement {
  const details = el("details", "trace");
  details.append(el("summary", undefined, label));
  if (trace) {
    const pre = el("pre", "trace-text", trace);
    details.append(pre);
  } else {
    details.append(el("p", "trace-empty", "No reasoning trace for this model."));
  }
  return details;
}

/** Inline error panel; the caller wires the retry button. */
export function renderError(error: ErrorBody, onRetry: () => void): HTMLDivElement {
  const panel = el("div", "error-panel");
  panel.append(el("strong", "error-code", error.code));
  panel.append(el("span", "error-message", error.message));
  if (error.detail) {
    panel.append(el("p", "error-detail", error.detail));
  }
  const retry = el("button", "retry", "Retry");
  retry.type = "button";
  retry.addEventListener("click", onRetry);
  panel.append(retry);
  return panel;
}
