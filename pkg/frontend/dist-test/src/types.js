/** Payload shapes of the lifecycle API the dashboard consumes. */
export const LEVEL_LABELS = [
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
