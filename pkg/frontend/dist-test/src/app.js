/** Browser entry point: lifecycle graph, component detail, review form, risk
 * grid, analytics, and the what-if panel, kept live off the event feed.
 */
import { ApiClient, FetchHttp } from "./api.js";
import { backwardEdges } from "./graph.js";
import { formBlockers, submitReview } from "./review.js";
import { buildHeatGrid } from "./riskGrid.js";
import { DashboardStore } from "./store.js";
import { LEVEL_LABELS } from "./types.js";
import { esc, renderAnalytics, renderComponentDetail, renderHeatGrid, renderReviewBlockers, } from "./views.js";
import { whatIfSwitchback } from "./whatif.js";
const POLL_MS = 1000;
function renderGraph(view, systemTrl) {
    const columns = view.columns
        .map((level) => {
        const nodes = view.nodes
            .filter((n) => n.column === level)
            .map((n) => `<div class="node status-${esc(n.status)}" data-id="${esc(n.id)}" data-column="${n.column}">` +
            `${esc(n.name)}</div>`)
            .join("");
        return (`<div class="column" data-level="${level}">` +
            `<h4>L${level}</h4><small>${esc(LEVEL_LABELS[level] ?? "")}</small>${nodes}</div>`);
    })
        .join("");
    const edges = view.edges
        .map((e) => `<li class="${e.to < e.from ? "backward" : "forward"}">` +
        `${e.from} &rarr; ${e.to} (${esc(e.kind)}) &times;${e.count}</li>`)
        .join("");
    return (`<p>system TRL: <strong>${systemTrl ?? "-"}</strong>; ` +
        `switchback edges: ${backwardEdges(view).length}</p>` +
        `<div class="graph">${columns}</div><ul class="edges">${edges}</ul>`);
}
async function showDetail(api, host, componentId) {
    const [cardBody, componentBody] = await Promise.all([
        api.getCard(componentId),
        api.getComponent(componentId),
    ]);
    const deliverables = componentBody.component.deliverables;
    host.innerHTML = renderComponentDetail(cardBody.card, deliverables);
}
function wireWhatIf(api, host) {
    host.innerHTML =
        `<h3>What if?</h3>` +
            `<input id="wi-component" placeholder="component id">` +
            `<select id="wi-kind"><option>embedded</option><option>discovery</option></select>` +
            `<input id="wi-to" type="number" min="0" max="9" value="7">` +
            `<button id="wi-run">project</button><pre id="wi-out"></pre>`;
    const out = host.querySelector("#wi-out");
    host.querySelector("#wi-run").addEventListener("click", async () => {
        const component = host.querySelector("#wi-component").value;
        const kind = host.querySelector("#wi-kind").value;
        const to = Number(host.querySelector("#wi-to").value);
        const projection = await whatIfSwitchback(api, component, kind, to);
        out.textContent = projection.legal
            ? `projected level ${projection.projectedLevel}, system TRL ` +
                `${projection.projectedSystemTrl}\nreopened:\n` +
                projection.reopened.map((r) => `  ${r}`).join("\n")
            : projection.explanation ?? "not allowed";
    });
}
function wireReviewForm(api, host, people, stakeholderRoles, store) {
    host.innerHTML =
        `<h3>Record a review</h3>` +
            `<input id="rv-component" placeholder="component id">` +
            `<input id="rv-panel" placeholder="panel ids, comma separated">` +
            `<input id="rv-ethics" placeholder="ethics checklist URI">` +
            `<input id="rv-checklist" placeholder='checklist JSON {"key": true}'>` +
            `<select id="rv-decision"><option>graduate</option><option>hold</option>` +
            `<option>switchback</option></select>` +
            `<input id="rv-to" type="number" min="0" max="9" placeholder="target level">` +
            `<div id="rv-blockers"></div>` +
            `<button id="rv-submit">submit</button><pre id="rv-out"></pre>`;
    const out = host.querySelector("#rv-out");
    const blockersHost = host.querySelector("#rv-blockers");
    const readForm = () => {
        const componentId = host.querySelector("#rv-component").value;
        const level = store.component(componentId)?.level ?? 0;
        let checklist = {};
        try {
            checklist = JSON.parse(host.querySelector("#rv-checklist").value || "{}");
        }
        catch {
            checklist = {};
        }
        const toRaw = host.querySelector("#rv-to").value;
        return {
            componentId,
            level,
            panel: host.querySelector("#rv-panel").value.split(",").filter(Boolean),
            ethicsChecklistRef: host.querySelector("#rv-ethics").value,
            checklist,
            decision: host.querySelector("#rv-decision").value,
            toLevel: toRaw === "" ? undefined : Number(toRaw),
            reasons: [],
        };
    };
    const refresh = () => {
        const blockers = formBlockers(readForm(), people, stakeholderRoles);
        blockersHost.innerHTML = renderReviewBlockers(blockers);
        host.querySelector("#rv-submit").disabled = blockers.length > 0;
    };
    host.addEventListener("input", refresh);
    refresh();
    host.querySelector("#rv-submit").addEventListener("click", async () => {
        const outcome = await submitReview(api, readForm());
        out.textContent = outcome.ok
            ? `gate: ${outcome.gate.outcome}` +
                (outcome.gate.missing.length ? `; missing: ${outcome.gate.missing.join(", ")}` : "")
            : `${outcome.error.code}: ${outcome.error.detail}`;
    });
}
async function main() {
    const root = document.getElementById("app");
    if (!root) {
        return;
    }
    const api = new ApiClient(new FetchHttp(""));
    const project = await api.getProject();
    const paths = await api.getPaths();
    const store = DashboardStore.fromSnapshot(project, paths.paths);
    const hosts = Object.fromEntries(["graph", "detail", "whatif", "review", "risks", "analytics"].map((name) => {
        const element = document.createElement("section");
        element.id = `view-${name}`;
        root.appendChild(element);
        return [name, element];
    }));
    root.replaceChildren(...Object.values(hosts));
    const render = () => {
        hosts.graph.innerHTML = renderGraph(store.graphView(), store.systemTrl());
    };
    store.onChange(render);
    render();
    hosts.graph.addEventListener("click", (event) => {
        const node = event.target.closest(".node");
        if (node?.dataset.id) {
            void showDetail(api, hosts.detail, node.dataset.id);
        }
    });
    wireWhatIf(api, hosts.whatif);
    wireReviewForm(api, hosts.review, project.people, project.stakeholder_roles, store);
    const risks = await api.getRisks();
    hosts.risks.innerHTML = `<h3>Risk matrix</h3>` + renderHeatGrid(buildHeatGrid(risks.matrix));
    const dwells = await api.getDwells();
    hosts.analytics.innerHTML = `<h3>Analytics</h3>` + renderAnalytics(dwells.dwells, paths.paths);
    const poll = async () => {
        try {
            const feed = await api.getEvents(store.seqHorizon);
            for (const event of feed.events) {
                store.applyEvent(event);
            }
        }
        finally {
            setTimeout(poll, POLL_MS);
        }
    };
    setTimeout(poll, POLL_MS);
}
main().catch((error) => {
    const root = document.getElementById("app");
    if (root) {
        root.textContent = `failed to load: ${error}`;
    }
});
