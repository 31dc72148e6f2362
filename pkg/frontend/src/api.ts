/** Thin typed client over the esglens HTTP API.
 *
 * The fetch implementation is injectable so tests run without a network or
 * a DOM. Failures normalize to ApiError: service error bodies keep their
 * stable code, transport failures become the retryable "UNREACHABLE".
 */

import type {
  Answer,
  ApiErrorBody,
  Company,
  CompanyScores,
  Metrics,
  PageText,
  Question,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly retryable: boolean;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
    this.retryable = code === "UNREACHABLE";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError("UNREACHABLE", `service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let code = `HTTP_${response.status}`;
      let message = response.statusText;
      try {
        const body = (await response.json()) as ApiErrorBody;
        if (body?.error?.code) {
          code = body.error.code;
          message = body.error.message;
        }
      } catch {
        // non-JSON error body: keep the HTTP status code
      }
      throw new ApiError(code, message);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("/health");
  }

  companies(): Promise<Company[]> {
    return this.request("/companies");
  }

  questions(): Promise<Question[]> {
    return this.request("/questions");
  }

  ask(reportId: string, question: string, strategy?: string): Promise<Answer> {
    return this.request("/ask", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        report_id: reportId,
        question,
        strategy: strategy ?? null,
      }),
    });
  }

  pageText(reportId: string, pageNumber: number): Promise<PageText> {
    return this.request(
      `/reports/${encodeURIComponent(reportId)}/pages/${pageNumber}`,
    );
  }

  scores(companyId: string): Promise<CompanyScores> {
    return this.request(`/scores/${encodeURIComponent(companyId)}`);
  }

  metrics(runId: string): Promise<Metrics> {
    return this.request(`/metrics/${encodeURIComponent(runId)}`);
  }
}
