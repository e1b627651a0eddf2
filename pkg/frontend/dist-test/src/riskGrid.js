/** Risk matrix heat grid shaped for rendering. */
export function buildHeatGrid(matrix) {
    const counts = Array.from({ length: 5 }, () => Array.from({ length: 5 }, () => 0));
    const cellEntries = new Map();
    for (const [key, ids] of Object.entries(matrix.cells)) {
        const [liRaw, iiRaw] = key.split(",");
        const li = Number(liRaw);
        const ii = Number(iiRaw);
        if (Number.isInteger(li) && Number.isInteger(ii) && li >= 0 && li < 5 && ii >= 0 && ii < 5) {
            counts[li][ii] = ids.length;
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
export function totalOpen(grid) {
    return grid.counts.flat().reduce((a, b) => a + b, 0);
}
