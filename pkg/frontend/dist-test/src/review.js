/** Review form logic: client-side pre-checks plus the authoritative submit.
 *
 * The pre-check mirrors the server's panel rules so the form can disable the
 * graduate button early, but the server response always wins.
 */
import { ApiError } from "./api.js";
const PANEL_RULES = [
    { kind: "exactly_roles", roles: ["ResearchLead"] },
    { kind: "all_members_have", role: "Researcher" },
    { kind: "all_members_have", role: "Researcher" },
    { kind: "must_include_roles", roles: ["AppliedAI", "Engineering"] },
    { kind: "must_include_roles", roles: ["ProductManager"] },
    { kind: "must_include_roles", roles: ["ProductManager"] },
    { kind: "must_include_roles", roles: ["ProductManager"] },
    { kind: "must_include_roles", roles: ["Infrastructure", "AppliedAI", "QA"] },
    { kind: "full_slate" },
    { kind: "full_slate" },
];
export function panelPreCheck(level, panelIds, people, stakeholderRoles) {
    const rule = PANEL_RULES[level];
    if (!rule) {
        return [`no panel rule for level ${level}`];
    }
    if (panelIds.length === 0) {
        return ["empty_panel"];
    }
    const byId = new Map(people.map((p) => [p.id, p]));
    const violations = [];
    const union = new Set();
    for (const id of panelIds) {
        const person = byId.get(id);
        if (!person) {
            violations.push(`unknown_person:${id}`);
            continue;
        }
        for (const role of person.roles) {
            union.add(role);
        }
    }
    const requireAll = (roles) => {
        for (const role of roles) {
            if (!union.has(role)) {
                violations.push(`missing_role:${role}`);
            }
        }
    };
    switch (rule.kind) {
        case "exactly_roles":
            for (const id of panelIds) {
                const person = byId.get(id);
                if (person && !person.roles.some((r) => rule.roles.includes(r))) {
                    violations.push(`unexpected_member:${id}`);
                }
            }
            requireAll(rule.roles);
            break;
        case "all_members_have":
            for (const id of panelIds) {
                const person = byId.get(id);
                if (person && !person.roles.includes(rule.role)) {
                    violations.push(`member_lacks_role:${id}:${rule.role}`);
                }
            }
            break;
        case "must_include_roles":
            requireAll(rule.roles);
            break;
        case "full_slate":
            if (stakeholderRoles.length === 0) {
                violations.push("stakeholder_roles_undeclared");
            }
            requireAll(stakeholderRoles);
            break;
    }
    return violations;
}
/** Reasons the form refuses to submit; empty means the button is enabled. */
export function formBlockers(form, people, stakeholderRoles) {
    const blockers = [];
    if (!form.ethicsChecklistRef.trim()) {
        blockers.push("an ethics checklist reference is required at every review");
    }
    if (form.decision === "switchback" && form.toLevel === undefined) {
        blockers.push("switchback decisions need a target level");
    }
    blockers.push(...panelPreCheck(form.level, form.panel, people, stakeholderRoles));
    return blockers;
}
export async function submitReview(api, form) {
    const body = {
        panel: form.panel,
        ethics_checklist_ref: form.ethicsChecklistRef,
        checklist: form.checklist,
        decision: form.decision,
        to_level: form.toLevel,
        reasons: form.reasons,
    };
    try {
        const response = await api.postReview(form.componentId, body);
        return { ok: true, gate: response.gate };
    }
    catch (error) {
        if (error instanceof ApiError) {
            return { ok: false, error: error.detail };
        }
        throw error;
    }
}
