/** What-if switchbacks: dry-run projections, and the real call on "apply".
 *
 * Both use identical request bodies; only the dry_run flag differs. Illegal
 * paths come back as an explanation, never as an applied change.
 */
export const LEGAL_EMBEDDED_PATHS = "4 -> 2, and 9 -> k for any k <= 7";
export async function whatIfSwitchback(api, componentId, kind, toLevel, reason = "") {
    const body = { kind, to_level: toLevel, reason };
    const response = (await api.switchback(componentId, body, true));
    const sim = response.simulation;
    if (sim.error) {
        const hint = sim.error === "IllegalEmbeddedPath"
            ? ` Legal embedded paths: ${LEGAL_EMBEDDED_PATHS}.`
            : "";
        return {
            legal: false,
            projectedLevel: null,
            reopened: [],
            projectedSystemTrl: null,
            warnings: sim.warnings,
            explanation: `${kind} switchback to level ${toLevel} is not allowed (${sim.error}).${hint}`,
        };
    }
    return {
        legal: true,
        projectedLevel: sim.projected_level,
        reopened: [...sim.reopened],
        projectedSystemTrl: sim.projected_system_trl,
        warnings: sim.warnings,
        explanation: null,
    };
}
export async function applySwitchback(api, componentId, kind, toLevel, reason) {
    const body = { kind, to_level: toLevel, reason };
    return (await api.switchback(componentId, body, false));
}
