/** Test transport: serves recorded API fixtures and captures every request. */

import { readFileSync } from "node:fs";

import type { HttpClient, HttpResponse } from "../src/api.js";

export function loadFixture<T>(name: string): T {
  const url = new URL(`../../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export interface CapturedRequest {
  method: string;
  path: string;
  body: unknown;
}

export class FakeHttp implements HttpClient {
  readonly requests: CapturedRequest[] = [];
  private readonly routes = new Map<string, HttpResponse>();

  route(method: string, path: string, body: unknown, status = 200): void {
    this.routes.set(`${method} ${path}`, { status, body });
  }

  async request(method: string, path: string, body?: unknown): Promise<HttpResponse> {
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

  mutatingRequests(): CapturedRequest[] {
    return this.requests.filter(
      (r) => r.method !== "GET" && !r.path.includes("dry_run=true"),
    );
  }
}
