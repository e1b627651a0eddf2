/** What-if switchbacks: dry-run projections, and the real call on "apply".
 *
 * Both use identical request bodies; only the dry_run flag differs. Illegal
 * paths come back as an explanation, never as an applied change.
 */

import type { ApiClient, SwitchbackRequestBody } from "./api.js";
import type { DryRunResponse, SwitchbackApplied } from "./types.js";

export const LEGAL_EMBEDDED_PATHS = "4 -> 2, and 9 -> k for any k <= 7";

export interface WhatIfProjection {
  legal: boolean;
  projectedLevel: number | null;
  reopened: string[];
  projectedSystemTrl: number | null;
  warnings: string[];
  explanation: string | null;
}

export async function whatIfSwitchback(
  api: ApiClient,
  componentId: string,
  kind: string,
  toLevel: number,
  reason = "",
): Promise<WhatIfProjection> {
  const body: SwitchbackRequestBody = { kind, to_level: toLevel, reason };
  const response = (await api.switchback(componentId, body, true)) as DryRunResponse;
  const sim = response.simulation;
  if (sim.error) {
    const hint =
      sim.error === "IllegalEmbeddedPath"
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

export async function applySwitchback(
  api: ApiClient,
  componentId: string,
  kind: string,
  toLevel: number,
  reason: string,
): Promise<SwitchbackApplied> {
  const body: SwitchbackRequestBody = { kind, to_level: toLevel, reason };
  return (await api.switchback(componentId, body, false)) as SwitchbackApplied;
}
