/** Analytics page shaping: dwell and path tables from API payloads. */
export function dwellTable(dwells) {
    return dwells.map((d) => ({
        component: d.component_ref,
        level: d.level,
        enteredAt: d.entered_at,
        duration: d.duration_seconds === null ? "open" : formatSeconds(d.duration_seconds),
    }));
}
export function formatSeconds(seconds) {
    if (seconds >= 86400) {
        return `${(seconds / 86400).toFixed(1)}d`;
    }
    if (seconds >= 3600) {
        return `${(seconds / 3600).toFixed(1)}h`;
    }
    return `${Math.round(seconds)}s`;
}
export function pathTable(paths) {
    return [...paths]
        .sort((a, b) => b.count - a.count || a.from_level - b.from_level)
        .map((p) => ({
        label: `${p.from_level} -> ${p.to_level}`,
        kind: p.kind,
        count: p.count,
        backward: p.to_level < p.from_level,
    }));
}
