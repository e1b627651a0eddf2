/** Client state: a project snapshot advanced by the ordered event stream.
 *
 * Every view renders from (snapshot, applied events); applying an event
 * notifies subscribers synchronously, so the next render cycle always sees
 * the new level.
 */

import { buildGraphView, type GraphView } from "./graph.js";
import type { ComponentSummary, EventRecord, PathRow, ProjectSummary } from "./types.js";

export class DashboardStore {
  private readonly components = new Map<string, ComponentSummary>();
  private paths: PathRow[] = [];
  private seq = 0;
  private readonly listeners: Array<() => void> = [];

  static fromSnapshot(project: ProjectSummary, paths: PathRow[]): DashboardStore {
    const store = new DashboardStore();
    for (const component of project.components) {
      store.components.set(component.id, { ...component });
    }
    store.paths = paths.map((p) => ({ ...p }));
    store.seq = project.seq_horizon;
    return store;
  }

  get seqHorizon(): number {
    return this.seq;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  component(id: string): ComponentSummary | undefined {
    return this.components.get(id);
  }

  componentList(): ComponentSummary[] {
    return [...this.components.values()];
  }

  systemTrl(): number | null {
    const levels = this.componentList()
      .filter((c) => c.status === "active")
      .map((c) => c.level);
    return levels.length ? Math.min(...levels) : null;
  }

  graphView(): GraphView {
    return buildGraphView(this.componentList(), this.paths);
  }

  applyEvent(event: EventRecord): void {
    if (event.seq <= this.seq) {
      return; // already folded in; the stream delivers each seq once
    }
    this.seq = event.seq;
    const payload = event.payload as Record<string, any>;
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

  private moveComponent(id: string, from: number, to: number, kind: string): void {
    const component = this.components.get(id);
    if (component) {
      component.level = to;
    }
    const edge = this.paths.find(
      (p) => p.from_level === from && p.to_level === to && p.kind === kind,
    );
    if (edge) {
      edge.count += 1;
    } else {
      this.paths.push({ from_level: from, to_level: to, kind, count: 1 });
    }
  }
}
