// Wire types mirroring the engine's HTTP API.

export const ROLES = [
  "patient",
  "family",
  "primary_care",
  "specialist",
  "nurse",
  "pharmacist",
  "insurance",
  "researcher",
  "emergency",
] as const;

export type Role = (typeof ROLES)[number];

export interface Evidence {
  uri: string;
  mime_type: string;
  hash: string;
}

export interface Clearance {
  denied_roles: Role[];
  reason?: string;
}

export interface ApiBead {
  id: string;
  type: string;
  timestamp: string;
  author: string;
  parents: string[];
  content: Record<string, unknown>;
  evidence?: Evidence[];
  clearance?: Clearance;
  signature?: string;
}

export interface EdgeDto {
  child: string;
  parent: string;
}

export interface PatientSummary {
  id: string;
  name: string | null;
  timestamp: string;
  bead_count: number;
}

export interface PatientBeadsResponse {
  patient: string;
  beads: ApiBead[];
  edges: EdgeDto[];
}

export interface ContextResponse {
  target: string;
  beads: ApiBead[];
  edges: EdgeDto[];
  depth_used: number;
  truncated: boolean;
}

/** Chronological comparison: instant first, id as deterministic tie-break. */
export function compareBeads(a: ApiBead, b: ApiBead): number {
  const ta = Date.parse(a.timestamp);
  const tb = Date.parse(b.timestamp);
  if (ta !== tb) return ta - tb;
  return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
}
