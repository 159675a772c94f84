// Thin typed client over the evaluation server's JSON API.

import type {
  ApiErrorBody,
  ComparisonDoc,
  EvaluationPayload,
  EvaluationSummary,
  PatchChange,
  TaxonomyDoc,
  TaxonomySummary,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
    this.name = "ApiRequestError";
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(response.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  listTaxonomies(): Promise<{ taxonomies: TaxonomySummary[] }> {
    return this.request("GET", "/api/taxonomies");
  }

  getTaxonomy(id: string): Promise<TaxonomyDoc> {
    return this.request("GET", `/api/taxonomies/${encodeURIComponent(id)}`);
  }

  listEvaluations(): Promise<{ evaluations: EvaluationSummary[] }> {
    return this.request("GET", "/api/evaluations");
  }

  createEvaluation(req: {
    system: string;
    evaluator: string;
    mode: string;
    taxonomy_id?: string;
    taxonomy_version?: string;
  }): Promise<EvaluationPayload> {
    return this.request("POST", "/api/evaluations", req);
  }

  getEvaluation(id: string): Promise<EvaluationPayload> {
    return this.request("GET", `/api/evaluations/${encodeURIComponent(id)}`);
  }

  patchMarks(
    id: string,
    revision: number,
    changes: PatchChange[],
  ): Promise<EvaluationPayload> {
    return this.request(
      "PATCH",
      `/api/evaluations/${encodeURIComponent(id)}/marks`,
      { revision, changes },
    );
  }

  compare(left: string, right: string): Promise<ComparisonDoc> {
    return this.request("POST", "/api/compare", { left, right });
  }
}
