/** Thin typed client over the lifecycle API.
 *
 * The HTTP transport is injected so tests can serve recorded fixtures and
 * capture every request the dashboard issues.
 */

import type {
  ApiErrorBody,
  ComponentSummary,
  DryRunResponse,
  DwellRow,
  EventRecord,
  GateResultView,
  PathRow,
  ProjectSummary,
  RiskMatrixView,
  RiskView,
  SwitchbackApplied,
} from "./types.js";

export interface HttpResponse {
  status: number;
  body: unknown;
}

export interface HttpClient {
  request(method: string, path: string, body?: unknown): Promise<HttpResponse>;
}

export class FetchHttp implements HttpClient {
  constructor(private readonly base: string = "") {}

  async request(method: string, path: string, body?: unknown): Promise<HttpResponse> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return { status: response.status, body: await response.json() };
  }
}

export class ApiError extends Error {
  constructor(public readonly detail: ApiErrorBody) {
    super(`${detail.code}: ${detail.detail}`);
  }
}

export interface SwitchbackRequestBody {
  kind: string;
  to_level: number;
  reason?: string;
  review_ref?: string;
}

export interface ReviewRequestBody {
  panel: string[];
  ethics_checklist_ref: string;
  checklist: Record<string, boolean>;
  decision: string;
  to_level?: number;
  reasons?: string[];
  postmortem_done?: boolean;
}

function unwrap<T>(response: HttpResponse): T {
  if (response.status >= 200 && response.status < 300) {
    return response.body as T;
  }
  throw new ApiError(response.body as ApiErrorBody);
}

export class ApiClient {
  constructor(private readonly http: HttpClient) {}

  async getProject(): Promise<ProjectSummary> {
    return unwrap(await this.http.request("GET", "/v1/project"));
  }

  async getComponents(): Promise<{ components: Record<string, unknown>[] }> {
    return unwrap(await this.http.request("GET", "/v1/components"));
  }

  async getComponent(componentId: string): Promise<{ component: Record<string, unknown> }> {
    return unwrap(await this.http.request("GET", `/v1/components/${componentId}`));
  }

  async getCard(componentId: string): Promise<{ card: Record<string, unknown> }> {
    return unwrap(await this.http.request("GET", `/v1/components/${componentId}/card`));
  }

  async getPaths(): Promise<{ paths: PathRow[] }> {
    return unwrap(await this.http.request("GET", "/v1/analytics/paths"));
  }

  async getDwells(): Promise<{ dwells: DwellRow[] }> {
    return unwrap(await this.http.request("GET", "/v1/analytics/time-per-level"));
  }

  async getRisks(): Promise<{ risks: RiskView[]; matrix: RiskMatrixView }> {
    return unwrap(await this.http.request("GET", "/v1/risks"));
  }

  async getEvents(since: number): Promise<{ events: EventRecord[]; seq_horizon: number }> {
    return unwrap(await this.http.request("GET", `/v1/events?since=${since}`));
  }

  /** Dry runs and real switchbacks share one request body by design. */
  async switchback(
    componentId: string,
    body: SwitchbackRequestBody,
    dryRun: boolean,
  ): Promise<DryRunResponse | SwitchbackApplied> {
    const query = dryRun ? "?dry_run=true" : "";
    return unwrap(
      await this.http.request("POST", `/v1/components/${componentId}/switchbacks${query}`, body),
    );
  }

  async postReview(
    componentId: string,
    body: ReviewRequestBody,
  ): Promise<{ gate: GateResultView; seq: number }> {
    return unwrap(await this.http.request("POST", `/v1/components/${componentId}/reviews`, body));
  }

  async postDecision(
    componentId: string,
    body: { level: number; choice: string; rationale: string },
  ): Promise<{ seq: number }> {
    return unwrap(await this.http.request("POST", `/v1/components/${componentId}/decisions`, body));
  }
}

export function componentsFromProject(project: ProjectSummary): ComponentSummary[] {
  return project.components;
}
