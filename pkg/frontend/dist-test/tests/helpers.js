/** Test transport: serves recorded API fixtures and captures every request. */
import { readFileSync } from "node:fs";
export function loadFixture(name) {
    const url = new URL(`../../fixtures/${name}`, import.meta.url);
    return JSON.parse(readFileSync(url, "utf-8"));
}
export class FakeHttp {
    requests = [];
    routes = new Map();
    route(method, path, body, status = 200) {
        this.routes.set(`${method} ${path}`, { status, body });
    }
    async request(method, path, body) {
        this.requests.push({ method, path, body });
        const match = this.routes.get(`${method} ${path}`);
        if (!match) {
            return {
                status: 404,
                body: { status: 404, code: "NotFound", detail: `no route for ${method} ${path}` },
            };
        }
        return match;
    }
    mutatingRequests() {
        return this.requests.filter((r) => r.method !== "GET" && !r.path.includes("dry_run=true"));
    }
}
