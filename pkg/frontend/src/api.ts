/**
 * Typed client for the generation service. The UI computes no pipeline
 * logic of its own: everything rendered comes back from these endpoints.
 */

export interface SamplePayload {
  problem: string;
  bug_code: string;
  failed_test: string;
  misconception: string;
  sample_id?: string;
}

export interface RtStep {
  label: string; // "A.1" .. "A.n"
  text: string;
  cites: string[];
}

export interface RtResponse {
  sample_id: string;
  config_id: string;
  prompt_version: string;
  steps: RtStep[];
  reasoning_trace: string | null;
}

export interface ConversationTurn {
  speaker: "Teacher" | "Student";
  text: string;
  step: string | null; // aligned RT label on stepped Teacher turns
}

export interface ConversationResponse {
  sample_id: string;
  config_id: string;
  prompt_version: string;
  turns: ConversationTurn[];
  plain_transcript: string;
  reasoning_trace: string | null;
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: string;
}

export class ServiceError extends Error {
  readonly code: string;
  readonly detail: string;

  constructor(body: ErrorBody) {
    super(body.message);
    this.code = body.code;
    this.detail = body.detail;
  }
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  async listModels(): Promise<string[]> {
    const response = await this.fetchFn(`${this.baseUrl}/models`);
    if (!response.ok) {
      throw await this.toError(response);
    }
    const body = (await response.json()) as { models: string[] };
    return body.models;
  }

  generateRt(sample: SamplePayload, configId: string): Promise<RtResponse> {
    return this.post<RtResponse>("/generate/rt", { sample, config_id: configId });
  }

  generateConversation(
    sample: SamplePayload,
    rt: Pick<RtStep, "label" | "text">[],
    configId: string,
  ): Promise<ConversationResponse> {
    return this.post<ConversationResponse>("/generate/conversation", {
      sample,
      rt,
      config_id: configId,
    });
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw await this.toError(response);
    }
    return (await response.json()) as T;
  }

  private async toError(response: Response): Promise<ServiceError> {
    try {
      const body = (await response.json()) as ErrorBody;
      if (body && body.code && body.message) {
        return new ServiceError(body);
      }
    } catch {
      // fall through to the generic error below
    }
    return new ServiceError({
      code: `http_${response.status}`,
      message: `service returned ${response.status}`,
      detail: "",
    });
  }
}
