import assert from "node:assert/strict";
import { test } from "node:test";

import { dwellTable, formatSeconds, pathTable } from "../src/analytics.js";
import { buildHeatGrid, totalOpen } from "../src/riskGrid.js";
import type { DwellRow, PathRow, RiskMatrixView, RiskView } from "../src/types.js";
import {
  renderAnalytics,
  renderComponentDetail,
  renderHeatGrid,
  renderReviewBlockers,
  type CardPayload,
} from "../src/views.js";
import { loadFixture } from "./helpers.js";

const RISKS = loadFixture<{ risks: RiskView[]; matrix: RiskMatrixView }>("risks.json");
const DWELLS = loadFixture<{ dwells: DwellRow[] }>("dwells.json").dwells;
const PATHS = loadFixture<{ paths: PathRow[] }>("paths.json").paths;

test("heat grid counts match the open entries in the matrix", () => {
  const grid = buildHeatGrid(RISKS.matrix);
  const open = RISKS.risks.filter((r) => r.status === "open").length;
  assert.equal(totalOpen(grid), open);
});

test("heat grid places ids where the API put them", () => {
  const grid = buildHeatGrid(RISKS.matrix);
  for (const [key, ids] of Object.entries(RISKS.matrix.cells)) {
    assert.deepEqual(grid.cellEntries.get(key), ids);
  }
});

test("dwell table marks open stays and formats closed ones", () => {
  const rows = dwellTable(DWELLS);
  assert.equal(rows.length, DWELLS.length);
  for (const [i, row] of rows.entries()) {
    if (DWELLS[i]!.duration_seconds === null) {
      assert.equal(row.duration, "open");
    } else {
      assert.notEqual(row.duration, "open");
    }
  }
});

test("duration formatting picks sensible units", () => {
  assert.equal(formatSeconds(30), "30s");
  assert.equal(formatSeconds(7200), "2.0h");
  assert.equal(formatSeconds(2 * 86400), "2.0d");
});

test("path table flags backward transitions", () => {
  const rows = pathTable(PATHS);
  const backward = rows.filter((r) => r.backward);
  assert.equal(backward.length, 1);
  assert.equal(backward[0]!.label, "7 -> 4");
  assert.equal(backward[0]!.kind, "review");
});

test("component detail renders from the machine-readable card payload", () => {
  const card: CardPayload = {
    component_ref: "poc-ranker",
    level: 4,
    owners: ["cam"],
    reviewers: ["pm", "cam"],
    dev_status: "active (level 4: Proof of Concept Development)",
    versions: { code: "1.0.0", model: "0.2.0", data: "1.1.0" },
    summary: "ranks detected items",
    assumptions: ["stable capture rig"],
    data_sources: [
      { name: "field captures", version: "1.0.0", datasheet: "https://sheets/f", synthetic: false },
    ],
    known_biases_corner_cases: [],
    ethics_text: "reviewed at every gate",
    ethics_checklist_uri: "https://ethics/poc",
    risks_snapshot: [{ id: "risk-1", requirement_ref: "req-1", score: "4.0000", status: "open" }],
    review_history: [{ level: 4, at: "2026-05-02T00:00:00Z", decision: "graduate" }],
  };
  const html = renderComponentDetail(card, {
    "4": [
      { key: "poc_demo", done: true, not_applicable: false, evidence: "https://e" },
      { key: "ethics_checklist", done: false, not_applicable: false, evidence: "" },
    ],
  });
  assert.match(html, /poc-ranker at L4/);
  assert.match(html, /field captures/);
  assert.match(html, /poc_demo: done/);
  assert.match(html, /ethics_checklist: open/);
  assert.match(html, /risk-1 on req-1/);
});

test("review blockers render as a list; empty means submit enabled", () => {
  assert.match(renderReviewBlockers([]), /pre-checks pass/);
  const html = renderReviewBlockers(["missing_role:QA"]);
  assert.match(html, /missing_role:QA/);
});

test("heat grid html puts the hottest likelihood row on top", () => {
  const grid = buildHeatGrid(RISKS.matrix);
  const html = renderHeatGrid(grid);
  const firstRow = html.split("<tr>")[2]!; // header, then top likelihood row
  assert.match(firstRow, /0\.8/);
});

test("analytics view includes dwell and path tables", () => {
  const html = renderAnalytics(DWELLS, PATHS);
  assert.match(html, /Time per level/);
  assert.match(html, /Paths/);
  assert.match(html, /7 -&#62; 4/); // escaped "7 -> 4" row
  assert.match(html, /class="backward"/);
});
