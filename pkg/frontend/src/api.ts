import type {
  ExplanationDoc,
  ExplanationSummary,
  PageDoc,
  RatingSubmission,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: string,
  ) {
    super(`HTTP ${status}: ${body}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin client over the explanation service; all content shown in the UI
 * comes back from these calls, never from local mutation. */
export class Client {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get(path: string): Promise<unknown> {
    const response = await this.fetchImpl(this.baseUrl + path);
    const body = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return JSON.parse(body);
  }

  listExplanations(): Promise<ExplanationSummary[]> {
    return this.get("/explanations") as Promise<ExplanationSummary[]>;
  }

  getExplanation(id: string): Promise<ExplanationDoc> {
    return this.get(`/explanations/${encodeURIComponent(id)}`) as Promise<ExplanationDoc>;
  }

  getPages(): Promise<PageDoc[]> {
    return this.get("/pages") as Promise<PageDoc[]>;
  }

  getPage(id: string): Promise<PageDoc> {
    return this.get(`/pages/${encodeURIComponent(id)}`) as Promise<PageDoc>;
  }

  async submitRating(submission: RatingSubmission): Promise<void> {
    const response = await this.fetchImpl(this.baseUrl + "/ratings", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
    if (!response.ok) {
      // surface the server's error body verbatim
      throw new ApiError(response.status, await response.text());
    }
  }
}
