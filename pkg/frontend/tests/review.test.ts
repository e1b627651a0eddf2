import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient } from "../src/api.js";
import { formBlockers, panelPreCheck, submitReview, type ReviewForm } from "../src/review.js";
import type { PersonView } from "../src/types.js";
import { FakeHttp } from "./helpers.js";

const PEOPLE: PersonView[] = [
  { id: "lead", name: "Lead", roles: ["ResearchLead", "Researcher"] },
  { id: "ana", name: "Ana", roles: ["Researcher"] },
  { id: "cam", name: "Cam", roles: ["AppliedAI"] },
  { id: "dev", name: "Dev", roles: ["Engineering"] },
  { id: "pm", name: "Pm", roles: ["ProductManager"] },
  { id: "qa", name: "Qa", roles: ["QA"] },
  { id: "stk", name: "Stk", roles: ["Stakeholder"] },
];

const STAKEHOLDERS = ["ResearchLead", "ProductManager", "QA", "Stakeholder"];

function baseForm(): ReviewForm {
  return {
    componentId: "poc-ranker",
    level: 0,
    panel: ["lead"],
    ethicsChecklistRef: "https://ethics/l0",
    checklist: { research_plan: true, trl_card_started: true },
    decision: "graduate",
    reasons: [],
  };
}

test("level-0 panel of one research lead passes the pre-check", () => {
  assert.deepEqual(panelPreCheck(0, ["lead"], PEOPLE, STAKEHOLDERS), []);
});

test("level-7 panel without infrastructure fails the pre-check", () => {
  const violations = panelPreCheck(7, ["cam", "qa"], PEOPLE, STAKEHOLDERS);
  assert.ok(violations.includes("missing_role:Infrastructure"));
});

test("full-slate pre-check demands every declared stakeholder role", () => {
  const violations = panelPreCheck(8, ["lead", "pm", "qa"], PEOPLE, STAKEHOLDERS);
  assert.deepEqual(violations, ["missing_role:Stakeholder"]);
  assert.deepEqual(panelPreCheck(8, ["lead", "pm", "qa", "stk"], PEOPLE, STAKEHOLDERS), []);
});

test("missing ethics reference blocks the submit button client-side", () => {
  const form = { ...baseForm(), ethicsChecklistRef: "  " };
  const blockers = formBlockers(form, PEOPLE, STAKEHOLDERS);
  assert.ok(blockers.some((b) => b.includes("ethics checklist")));
});

test("a clean form has no blockers", () => {
  assert.deepEqual(formBlockers(baseForm(), PEOPLE, STAKEHOLDERS), []);
});

test("server-side violation is rendered even when the pre-check passed", async () => {
  // the server stays authoritative: the client rule table may be stale
  const http = new FakeHttp();
  http.route(
    "POST",
    "/v1/components/poc-ranker/reviews",
    { status: 422, code: "PanelViolation", detail: "panel violates exactly_roles(ResearchLead)" },
    422,
  );
  const outcome = await submitReview(new ApiClient(http), baseForm());
  assert.equal(outcome.ok, false);
  if (!outcome.ok) {
    assert.equal(outcome.error.code, "PanelViolation");
    assert.match(outcome.error.detail, /ResearchLead/);
  }
});

test("successful submit returns the gate result", async () => {
  const http = new FakeHttp();
  http.route("POST", "/v1/components/poc-ranker/reviews", {
    gate: { outcome: "graduated", missing: [], new_level: 1 },
    seq: 42,
    seq_horizon: 42,
  });
  const outcome = await submitReview(new ApiClient(http), baseForm());
  assert.equal(outcome.ok, true);
  if (outcome.ok) {
    assert.equal(outcome.gate.new_level, 1);
  }
});
