/**
 * Mapping table over the service's config ids.
 *
 * Naming convention from the gateway registry: the gpt-5 families encode
 * a reasoning effort level in the id (always reasoning-enabled); claude
 * and gemini families pair a plain id with a "-thinking" variant.
 */

const THINKING_SUFFIX = "-thinking";
// Longest prefix first so "gpt-5-mini-low" resolves to gpt-5-mini.
const EFFORT_FAMILIES = ["gpt-5-mini", "gpt-5"];

export function effortFamily(configId: string): string | null {
  for (const family of EFFORT_FAMILIES) {
    if (configId === family || configId.startsWith(`${family}-`)) {
      return family;
    }
  }
  return null;
}

export function isReasoningConfig(configId: string): boolean {
  return effortFamily(configId) !== null || configId.endsWith(THINKING_SUFFIX);
}

/** Effort-based families cannot turn reasoning off. */
export function supportsReasoningToggle(configId: string): boolean {
  return effortFamily(configId) === null;
}

/**
 * Resolve the config id for the requested reasoning setting, staying
 * within the ids the service actually advertises.
 */
export function withReasoning(
  configId: string,
  enabled: boolean,
  available: string[],
): string {
  if (!supportsReasoningToggle(configId)) {
    return configId;
  }
  const plain = configId.endsWith(THINKING_SUFFIX)
    ? configId.slice(0, -THINKING_SUFFIX.length)
    : configId;
  const wanted = enabled ? `${plain}${THINKING_SUFFIX}` : plain;
  return available.includes(wanted) ? wanted : configId;
}

/** Reasoning variants are the default selection on a fresh load. */
export function defaultConfig(available: string[]): string {
  const reasoning = available.find(isReasoningConfig);
  return reasoning ?? available[0] ?? "";
}
