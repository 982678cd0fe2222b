import type {
  BatchView,
  MetricsView,
  StatusView,
  SubmitResult,
} from "./types.js";

/** Error reported by the service's JSON error envelope. */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly httpStatus: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/**
 * Thin typed client for the annotation service.  The fetch function is
 * injectable so tests can run against an in-process mock.
 */
export class WorkbenchApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? (globalThis.fetch.bind(globalThis) as FetchLike);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json; charset=utf-8" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    let payload: unknown;
    try {
      payload = await res.json();
    } catch {
      throw new ApiError("bad_response", `non-JSON reply from ${path}`, res.status);
    }
    if (!res.ok) {
      const envelope = payload as { error?: { code?: string; message?: string } };
      throw new ApiError(
        envelope.error?.code ?? "http_error",
        envelope.error?.message ?? `request failed with status ${res.status}`,
        res.status,
      );
    }
    return payload as T;
  }

  /** Create a session from a campaign config mapping; returns its status view. */
  createSession(config: Record<string, unknown>): Promise<StatusView> {
    return this.request<StatusView>("POST", "/sessions", config);
  }

  getStatus(sessionId: string): Promise<StatusView> {
    return this.request<StatusView>("GET", `/sessions/${encodeURIComponent(sessionId)}/status`);
  }

  getBatch(sessionId: string): Promise<BatchView> {
    return this.request<BatchView>("GET", `/sessions/${encodeURIComponent(sessionId)}/batch`);
  }

  getMetrics(sessionId: string): Promise<MetricsView> {
    return this.request<MetricsView>("GET", `/sessions/${encodeURIComponent(sessionId)}/metrics`);
  }

  submitTranslation(sessionId: string, exampleId: string, text: string): Promise<SubmitResult> {
    return this.request<SubmitResult>(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/translations`,
      { translations: { [exampleId]: text } },
    );
  }
}
