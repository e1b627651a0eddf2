/** HTML builders for the component detail, review form, risk grid, and
 * analytics views. Pure string functions so they test without a DOM; the
 * card view renders from the machine-readable card payload, never by
 * re-parsing markdown.
 */
import { dwellTable, pathTable } from "./analytics.js";
export function esc(text) {
    return text.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}
export function renderComponentDetail(card, deliverables) {
    const sources = card.data_sources
        .map((s) => `<li>${esc(s.name)} (${esc(s.version)}) ${s.synthetic ? "synthetic" : "real"} ` +
        `<a href="${esc(s.datasheet)}">datasheet</a></li>`)
        .join("");
    const history = card.review_history
        .map((r) => `<tr><td>L${r.level}</td><td>${esc(r.at)}</td><td>${esc(r.decision)}</td></tr>`)
        .join("");
    const risks = card.risks_snapshot
        .map((r) => `<li>${esc(r.id)} on ${esc(r.requirement_ref)}: ${esc(r.score)} (${esc(r.status)})</li>`)
        .join("");
    const checklist = Object.entries(deliverables)
        .sort(([a], [b]) => Number(a) - Number(b))
        .map(([level, items]) => {
        const rows = items
            .map((item) => {
            const mark = item.not_applicable ? "n/a" : item.done ? "done" : "open";
            return `<li class="deliverable-${mark}">${esc(item.key)}: ${mark}</li>`;
        })
            .join("");
        return `<h4>Level ${esc(level)}</h4><ul>${rows}</ul>`;
    })
        .join("");
    return (`<h2>${esc(card.component_ref)} at L${card.level}</h2>` +
        `<p>${esc(card.dev_status)}</p>` +
        `<p>owners: ${esc(card.owners.join(", "))}; reviewers: ${esc(card.reviewers.join(", "))}</p>` +
        `<p>versions: code ${esc(card.versions.code)}, model ${esc(card.versions.model)}, ` +
        `data ${esc(card.versions.data)}</p>` +
        `<section><h3>Summary</h3><p>${esc(card.summary)}</p></section>` +
        `<section><h3>Data</h3><ul>${sources}</ul></section>` +
        `<section><h3>Ethics</h3><p>${esc(card.ethics_text)} ` +
        `<a href="${esc(card.ethics_checklist_uri)}">checklist</a></p></section>` +
        `<section><h3>Risks</h3><ul>${risks}</ul></section>` +
        `<section><h3>Review history</h3><table>${history}</table></section>` +
        `<section><h3>Deliverables</h3>${checklist}</section>`);
}
export function renderReviewBlockers(blockers) {
    if (blockers.length === 0) {
        return `<p class="ok">pre-checks pass; the server stays authoritative</p>`;
    }
    const items = blockers.map((b) => `<li>${esc(b)}</li>`).join("");
    return `<ul class="blockers">${items}</ul>`;
}
export function renderHeatGrid(grid) {
    const header = `<tr><th></th>` + grid.impactLabels.map((l) => `<th>${esc(l)}</th>`).join("") + `</tr>`;
    const rows = [...grid.counts.keys()]
        .reverse() // highest likelihood on top
        .map((li) => {
        const cells = grid.counts[li]
            .map((count, ii) => `<td class="heat-${Math.min(count, 5)}" data-cell="${li},${ii}">${count}</td>`)
            .join("");
        return `<tr><th>${esc(grid.likelihoodLabels[li] ?? "")}</th>${cells}</tr>`;
    })
        .join("");
    return `<table class="heat">${header}${rows}</table>`;
}
export function renderAnalytics(dwells, paths) {
    const dwellRows = dwellTable(dwells)
        .map((r) => `<tr><td>${esc(r.component)}</td><td>L${r.level}</td>` +
        `<td>${esc(r.enteredAt)}</td><td>${esc(r.duration)}</td></tr>`)
        .join("");
    const pathRows = pathTable(paths)
        .map((r) => `<tr class="${r.backward ? "backward" : "forward"}">` +
        `<td>${esc(r.label)}</td><td>${esc(r.kind)}</td><td>${r.count}</td></tr>`)
        .join("");
    return (`<section><h3>Time per level</h3><table>${dwellRows}</table></section>` +
        `<section><h3>Paths</h3><table>${pathRows}</table></section>`);
}
