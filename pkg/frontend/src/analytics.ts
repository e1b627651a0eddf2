/** Analytics page shaping: dwell and path tables from API payloads. */

import type { DwellRow, PathRow } from "./types.js";

export interface DwellTableRow {
  component: string;
  level: number;
  enteredAt: string;
  duration: string;
}

export function dwellTable(dwells: DwellRow[]): DwellTableRow[] {
  return dwells.map((d) => ({
    component: d.component_ref,
    level: d.level,
    enteredAt: d.entered_at,
    duration: d.duration_seconds === null ? "open" : formatSeconds(d.duration_seconds),
  }));
}

export function formatSeconds(seconds: number): string {
  if (seconds >= 86400) {
    return `${(seconds / 86400).toFixed(1)}d`;
  }
  if (seconds >= 3600) {
    return `${(seconds / 3600).toFixed(1)}h`;
  }
  return `${Math.round(seconds)}s`;
}

export interface PathTableRow {
  label: string;
  kind: string;
  count: number;
  backward: boolean;
}

export function pathTable(paths: PathRow[]): PathTableRow[] {
  return [...paths]
    .sort((a, b) => b.count - a.count || a.from_level - b.from_level)
    .map((p) => ({
      label: `${p.from_level} -> ${p.to_level}`,
      kind: p.kind,
      count: p.count,
      backward: p.to_level < p.from_level,
    }));
}
