import assert from "node:assert/strict";
import { test } from "node:test";
import { ApiClient } from "../src/api.js";
import { applySwitchback, whatIfSwitchback } from "../src/whatif.js";
import { FakeHttp, loadFixture } from "./helpers.js";
const DRY_9_TO_7 = loadFixture("dryrun_embedded_9_to_7.json");
const DRY_4_TO_3 = loadFixture("dryrun_embedded_4_to_3.json");
function clientFor() {
    const http = new FakeHttp();
    http.route("POST", "/v1/components/deployed-detector/switchbacks?dry_run=true", DRY_9_TO_7);
    http.route("POST", "/v1/components/poc-ranker/switchbacks?dry_run=true", DRY_4_TO_3);
    return { api: new ApiClient(http), http };
}
test("what-if embedded 9->7 lists exactly the reopened keys from the dry run", async () => {
    const { api, http } = clientFor();
    const projection = await whatIfSwitchback(api, "deployed-detector", "embedded", 7);
    assert.equal(projection.legal, true);
    assert.equal(projection.projectedLevel, 7);
    assert.deepEqual(projection.reopened, DRY_9_TO_7.simulation.reopened);
    // reopened keys are the level-8 and level-9 deliverables, nothing else
    const levels = new Set(projection.reopened.map((key) => key.split(":")[0]));
    assert.deepEqual([...levels].sort(), ["8", "9"]);
    assert.equal(http.mutatingRequests().length, 0);
});
test("illegal embedded 4->3 renders an explanation and issues no mutating call", async () => {
    const { api, http } = clientFor();
    const projection = await whatIfSwitchback(api, "poc-ranker", "embedded", 3);
    assert.equal(projection.legal, false);
    assert.ok(projection.explanation);
    assert.match(projection.explanation, /IllegalEmbeddedPath/);
    assert.match(projection.explanation, /4 -> 2, and 9 -> k/);
    assert.deepEqual(projection.reopened, []);
    // request capture: only the dry-run POST went out, nothing mutating
    assert.equal(http.requests.length, 1);
    assert.ok(http.requests[0].path.endsWith("?dry_run=true"));
    assert.equal(http.mutatingRequests().length, 0);
});
test("dry-run and apply share the same request body shape", async () => {
    const { api, http } = clientFor();
    http.route("POST", "/v1/components/deployed-detector/switchbacks", {
        switchback: {
            kind: "embedded", component: "deployed-detector",
            from_level: 9, to_level: 7, reason: "model change", review_ref: null,
        },
        warnings: [],
        seq: 999,
        seq_horizon: 999,
    });
    await whatIfSwitchback(api, "deployed-detector", "embedded", 7, "model change");
    await applySwitchback(api, "deployed-detector", "embedded", 7, "model change");
    const [dry, real] = http.requests;
    assert.deepEqual(dry.body, real.body);
    assert.ok(dry.path.endsWith("?dry_run=true"));
    assert.ok(!real.path.includes("dry_run"));
});
test("projected system level comes straight from the dry-run payload", async () => {
    const { api } = clientFor();
    const projection = await whatIfSwitchback(api, "deployed-detector", "embedded", 7);
    assert.equal(projection.projectedSystemTrl, DRY_9_TO_7.simulation.projected_system_trl);
});
