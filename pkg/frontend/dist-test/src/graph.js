/** Lifecycle graph: components as nodes in level columns, transitions as edges. */
export function buildGraphView(components, paths) {
    const nodes = [...components]
        .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
        .map((c) => ({ id: c.id, name: c.name, column: c.level, status: c.status }));
    const edges = [...paths]
        .filter((p) => p.count > 0)
        .sort((a, b) => a.from_level - b.from_level || a.to_level - b.to_level || a.kind.localeCompare(b.kind))
        .map((p) => ({ from: p.from_level, to: p.to_level, kind: p.kind, count: p.count }));
    return {
        columns: Array.from({ length: 10 }, (_, i) => i),
        nodes,
        edges,
    };
}
export function backwardEdges(view) {
    return view.edges.filter((e) => e.to < e.from);
}
