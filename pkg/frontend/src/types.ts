/** Payload shapes of the lifecycle API the dashboard consumes. */

export interface ComponentSummary {
  id: string;
  name: string;
  level: number;
  status: string;
}

export interface ProjectSummary {
  id: string;
  name: string;
  system_trl: number | null;
  components: ComponentSummary[];
  people: PersonView[];
  stakeholder_roles: string[];
  seq_horizon: number;
}

export interface PathRow {
  from_level: number;
  to_level: number;
  kind: string;
  count: number;
}

export interface GateResultView {
  outcome: string;
  missing: string[];
  new_level: number | null;
}

export interface SimulationView {
  gate: GateResultView;
  reopened: string[];
  projected_level: number | null;
  projected_system_trl: number | null;
  warnings: string[];
  error: string | null;
}

export interface DryRunResponse {
  simulation: SimulationView;
  dry_run: boolean;
  seq_horizon: number;
}

export interface SwitchbackApplied {
  switchback: {
    kind: string;
    component: string;
    from_level: number;
    to_level: number;
    reason: string;
    review_ref: string | null;
  };
  warnings: string[];
  seq: number;
  seq_horizon: number;
}

export interface EventRecord {
  seq: number;
  kind: string;
  component_ref: string | null;
  payload: Record<string, unknown>;
  at: string;
  prev_hash: string;
  hash: string;
}

export interface ApiErrorBody {
  status: number;
  code: string;
  detail: string;
}

export interface PersonView {
  id: string;
  name: string;
  roles: string[];
}

export interface RiskView {
  id: string;
  requirement_ref: string;
  p_failure: string;
  value: number;
  score: string;
  mitigation: string;
  status: string;
}

export interface RiskMatrixView {
  likelihood_bins: string[];
  impact_bins: string[];
  cells: Record<string, string[]>;
}

export interface DwellRow {
  component_ref: string;
  level: number;
  entered_at: string;
  exited_at: string | null;
  duration_seconds: number | null;
}

export const LEVEL_LABELS: readonly string[] = [
  "First Principles",
  "Goal-Oriented Research",
  "Proof of Principle Development",
  "System Development",
  "Proof of Concept Development",
  "Machine Learning Capability",
  "Application Development",
  "Integrations",
  "Flight-ready",
  "Deployment",
];
