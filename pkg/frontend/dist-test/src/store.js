/** Client state: a project snapshot advanced by the ordered event stream.
 *
 * Every view renders from (snapshot, applied events); applying an event
 * notifies subscribers synchronously, so the next render cycle always sees
 * the new level.
 */
import { buildGraphView } from "./graph.js";
export class DashboardStore {
    components = new Map();
    paths = [];
    seq = 0;
    listeners = [];
    static fromSnapshot(project, paths) {
        const store = new DashboardStore();
        for (const component of project.components) {
            store.components.set(component.id, { ...component });
        }
        store.paths = paths.map((p) => ({ ...p }));
        store.seq = project.seq_horizon;
        return store;
    }
    get seqHorizon() {
        return this.seq;
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    component(id) {
        return this.components.get(id);
    }
    componentList() {
        return [...this.components.values()];
    }
    systemTrl() {
        const levels = this.componentList()
            .filter((c) => c.status === "active")
            .map((c) => c.level);
        return levels.length ? Math.min(...levels) : null;
    }
    graphView() {
        return buildGraphView(this.componentList(), this.paths);
    }
    applyEvent(event) {
        if (event.seq <= this.seq) {
            return; // already folded in; the stream delivers each seq once
        }
        this.seq = event.seq;
        const payload = event.payload;
        switch (event.kind) {
            case "EntryRegistered":
                this.components.set(payload.component_id, {
                    id: payload.component_id,
                    name: payload.name ?? payload.component_id,
                    level: payload.entry_level,
                    status: "active",
                });
                break;
            case "Graduated":
                this.moveComponent(payload.component_id, payload.from_level, payload.to_level, "forward");
                break;
            case "SwitchedBack":
                this.moveComponent(payload.component_id, payload.from_level, payload.to_level, payload.kind);
                break;
            case "StatusChanged": {
                const component = this.components.get(payload.component_id);
                if (component) {
                    component.status = payload.status;
                }
                break;
            }
            default:
                break; // other kinds do not change the graph
        }
        for (const listener of this.listeners) {
            listener();
        }
    }
    moveComponent(id, from, to, kind) {
        const component = this.components.get(id);
        if (component) {
            component.level = to;
        }
        const edge = this.paths.find((p) => p.from_level === from && p.to_level === to && p.kind === kind);
        if (edge) {
            edge.count += 1;
        }
        else {
            this.paths.push({ from_level: from, to_level: to, kind, count: 1 });
        }
    }
}
