/** Thin typed client over the lifecycle API.
 *
 * The HTTP transport is injected so tests can serve recorded fixtures and
 * capture every request the dashboard issues.
 */
export class FetchHttp {
    base;
    constructor(base = "") {
        this.base = base;
    }
    async request(method, path, body) {
        const response = await fetch(this.base + path, {
            method,
            headers: body === undefined ? {} : { "content-type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        return { status: response.status, body: await response.json() };
    }
}
export class ApiError extends Error {
    detail;
    constructor(detail) {
        super(`${detail.code}: ${detail.detail}`);
        this.detail = detail;
    }
}
function unwrap(response) {
    if (response.status >= 200 && response.status < 300) {
        return response.body;
    }
    throw new ApiError(response.body);
}
export class ApiClient {
    http;
    constructor(http) {
        this.http = http;
    }
    async getProject() {
        return unwrap(await this.http.request("GET", "/v1/project"));
    }
    async getComponents() {
        return unwrap(await this.http.request("GET", "/v1/components"));
    }
    async getComponent(componentId) {
        return unwrap(await this.http.request("GET", `/v1/components/${componentId}`));
    }
    async getCard(componentId) {
        return unwrap(await this.http.request("GET", `/v1/components/${componentId}/card`));
    }
    async getPaths() {
        return unwrap(await this.http.request("GET", "/v1/analytics/paths"));
    }
    async getDwells() {
        return unwrap(await this.http.request("GET", "/v1/analytics/time-per-level"));
    }
    async getRisks() {
        return unwrap(await this.http.request("GET", "/v1/risks"));
    }
    async getEvents(since) {
        return unwrap(await this.http.request("GET", `/v1/events?since=${since}`));
    }
    /** Dry runs and real switchbacks share one request body by design. */
    async switchback(componentId, body, dryRun) {
        const query = dryRun ? "?dry_run=true" : "";
        return unwrap(await this.http.request("POST", `/v1/components/${componentId}/switchbacks${query}`, body));
    }
    async postReview(componentId, body) {
        return unwrap(await this.http.request("POST", `/v1/components/${componentId}/reviews`, body));
    }
    async postDecision(componentId, body) {
        return unwrap(await this.http.request("POST", `/v1/components/${componentId}/decisions`, body));
    }
}
export function componentsFromProject(project) {
    return project.components;
}
