/** Risk matrix heat grid shaped for rendering. */

import type { RiskMatrixView } from "./types.js";

export interface HeatGrid {
  /** counts[likelihoodBin][impactBin], bin 0 = lowest. */
  counts: number[][];
  likelihoodLabels: string[];
  impactLabels: string[];
  cellEntries: Map<string, string[]>;
}

export function buildHeatGrid(matrix: RiskMatrixView): HeatGrid {
  const counts = Array.from({ length: 5 }, () => Array.from({ length: 5 }, () => 0));
  const cellEntries = new Map<string, string[]>();
  for (const [key, ids] of Object.entries(matrix.cells)) {
    const [liRaw, iiRaw] = key.split(",");
    const li = Number(liRaw);
    const ii = Number(iiRaw);
    if (Number.isInteger(li) && Number.isInteger(ii) && li >= 0 && li < 5 && ii >= 0 && ii < 5) {
      counts[li]![ii] = ids.length;
      cellEntries.set(key, [...ids]);
    }
  }
  return {
    counts,
    likelihoodLabels: [...matrix.likelihood_bins],
    impactLabels: [...matrix.impact_bins],
    cellEntries,
  };
}

export function totalOpen(grid: HeatGrid): number {
  return grid.counts.flat().reduce((a, b) => a + b, 0);
}
