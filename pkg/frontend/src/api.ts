/** Typed client for the explanation service HTTP API. */

export type Phase = "awaiting_question" | "awaiting_confirmation" | "answered";

export interface PathStep {
  id: string;
  title: string;
  level: string;
}

export interface PathView {
  goal: string;
  goal_title: string;
  steps: PathStep[];
  step_scores: number[];
}

export interface SessionResponse {
  session_id: string;
  phase: Phase;
  path: PathView;
}

export interface AskResponse {
  session_id: string;
  phase: Phase;
  interpretation: string;
  kind: string;
  target: string;
}

export interface ExplanationView {
  filled_text: string;
  slot_values: Record<string, string>;
  contextualized: boolean;
}

export interface ConfirmResponse {
  session_id: string;
  phase: Phase;
  target?: string;
  explanation?: ExplanationView;
}

/** Error envelope returned by the service for every domain failure. */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
    public readonly candidates?: string[],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorEnvelope {
  error?: { code?: string; message?: string; candidates?: string[] };
}

async function parseResponse<T>(response: Response): Promise<T> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON bodies fall through to the generic error below
  }
  if (!response.ok) {
    const envelope = (body ?? {}) as ErrorEnvelope;
    const error = envelope.error ?? {};
    throw new ApiError(
      error.code ?? "http_error",
      error.message ?? `request failed with status ${response.status}`,
      response.status,
      error.candidates,
    );
  }
  return body as T;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    }).then((r) => parseResponse<T>(r));
  }

  private get<T>(path: string): Promise<T> {
    return this.fetchImpl(`${this.baseUrl}${path}`).then((r) => parseResponse<T>(r));
  }

  startSession(start: string, goal: string): Promise<SessionResponse> {
    return this.post("/sessions", { start, goal });
  }

  getPath(sessionId: string): Promise<SessionResponse> {
    return this.get(`/sessions/${sessionId}/path`);
  }

  ask(sessionId: string, question: string): Promise<AskResponse> {
    return this.post(`/sessions/${sessionId}/ask`, { question });
  }

  confirm(sessionId: string, accepted: boolean): Promise<ConfirmResponse> {
    return this.post(`/sessions/${sessionId}/confirm`, { accepted });
  }

  health(): Promise<{ status: string; nodes: number }> {
    return this.get("/health");
  }
}
