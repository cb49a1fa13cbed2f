// Display categories for bead types: the five clinical categories carry
// distinct icons and colors; remaining clinical types share one neutral
// style; the patient root gets its own anchor style.

import type { ApiBead } from "./types.js";

export type Category =
  | "registration"
  | "encounter"
  | "observation"
  | "condition"
  | "medication"
  | "procedure"
  | "other";

const TYPE_TO_CATEGORY: Record<string, Category> = {
  patient_registration: "registration",
  fhir_encounter: "encounter",
  fhir_observation: "observation",
  fhir_condition: "condition",
  fhir_medicationrequest: "medication",
  fhir_procedure: "procedure",
};

export interface CategoryStyle {
  color: string;
  icon: string;
  label: string;
}

export const CATEGORY_STYLES: Record<Category, CategoryStyle> = {
  registration: { color: "#5b5b66", icon: "⚑", label: "Registration" },
  encounter: { color: "#2563eb", icon: "◆", label: "Encounter" },
  observation: { color: "#0d9488", icon: "◉", label: "Observation" },
  condition: { color: "#dc2626", icon: "▲", label: "Condition" },
  medication: { color: "#9333ea", icon: "✚", label: "Medication" },
  procedure: { color: "#d97706", icon: "⬟", label: "Procedure" },
  other: { color: "#64748b", icon: "●", label: "Event" },
};

export function categoryOf(beadType: string): Category {
  return TYPE_TO_CATEGORY[beadType] ?? "other";
}

function firstString(...candidates: unknown[]): string | null {
  for (const c of candidates) {
    if (typeof c === "string" && c.length > 0) return c;
  }
  return null;
}

/** Short human label for a bead, mined from its extracted content first
 * and the embedded original resource second. */
export function displayLabel(bead: ApiBead): string {
  const content = bead.content as Record<string, any>;
  const fhir = (content.fhir ?? {}) as Record<string, any>;
  const structured = (content.structured ?? {}) as Record<string, any>;
  const label = firstString(
    content.condition_name,
    structured.diagnosis,
    content.summary,
    fhir.code?.text,
    fhir.medicationCodeableConcept?.text,
    fhir.vaccineCode?.text,
    fhir.type?.[0]?.text,
    fhir.name?.[0] && [...(fhir.name[0].given ?? []), fhir.name[0].family].join(" "),
    bead.type,
  );
  return label ?? bead.type;
}
