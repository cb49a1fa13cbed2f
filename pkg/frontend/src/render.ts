// DOM renderers. Each function rebuilds one panel from data + callbacks;
// no renderer keeps state of its own.

import { CATEGORY_STYLES, categoryOf, displayLabel } from "./categories.js";
import { layoutGraph } from "./layout.js";
import { compareBeads, ROLES, type ApiBead, type ContextResponse, type EdgeDto, type PatientSummary, type Role } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Handlers {
  onSelectPatient(id: string): void;
  onSelectBead(id: string): void;
  onRetrieveContext(id: string): void;
}

// --- patient list panel -----------------------------------------------------

export function filterPatients(patients: PatientSummary[], query: string): PatientSummary[] {
  const needle = query.trim().toLowerCase();
  if (!needle) return patients;
  return patients.filter((p) => (p.name ?? "").toLowerCase().includes(needle));
}

export function renderPatientList(
  container: HTMLElement,
  patients: PatientSummary[],
  query: string,
  selected: string | null,
  handlers: Handlers,
): void {
  container.textContent = "";
  const matches = filterPatients(patients, query);
  if (matches.length === 0) {
    const empty = document.createElement("li");
    empty.className = "empty-state";
    empty.textContent = "No matching patients";
    container.appendChild(empty);
    return;
  }
  for (const patient of matches) {
    const item = document.createElement("li");
    item.className = "patient-row" + (patient.id === selected ? " selected" : "");
    item.dataset.patientId = patient.id;
    const name = document.createElement("span");
    name.className = "patient-name";
    name.textContent = patient.name ?? "(unnamed)";
    const meta = document.createElement("span");
    meta.className = "patient-meta";
    meta.textContent = `${patient.bead_count} events`;
    item.append(name, meta);
    item.addEventListener("click", () => handlers.onSelectPatient(patient.id));
    container.appendChild(item);
  }
}

// --- timeline: list view ------------------------------------------------------

export function renderListView(
  container: HTMLElement,
  beads: ApiBead[],
  selected: string | null,
  handlers: Handlers,
): void {
  container.textContent = "";
  const list = document.createElement("ul");
  list.id = "timeline-list";
  for (const bead of [...beads].sort(compareBeads)) {
    const category = categoryOf(bead.type);
    const style = CATEGORY_STYLES[category];
    const item = document.createElement("li");
    item.className = `timeline-row cat-${category}` + (bead.id === selected ? " selected" : "");
    item.dataset.beadId = bead.id;
    const icon = document.createElement("span");
    icon.className = "cat-icon";
    icon.textContent = style.icon;
    icon.style.color = style.color;
    const when = document.createElement("span");
    when.className = "row-time";
    when.textContent = bead.timestamp;
    const label = document.createElement("span");
    label.className = "row-label";
    label.textContent = displayLabel(bead);
    item.append(icon, when, label);
    item.addEventListener("click", () => handlers.onSelectBead(bead.id));
    list.appendChild(item);
  }
  container.appendChild(list);
}

// --- timeline: graph view -------------------------------------------------------

export function renderGraphView(
  container: HTMLElement,
  beads: ApiBead[],
  edges: EdgeDto[],
  selected: string | null,
  handlers: Handlers,
): void {
  container.textContent = "";
  const layout = layoutGraph(beads, edges);
  const byId = new Map(beads.map((b) => [b.id, b]));
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("id", "timeline-graph");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("width", String(layout.width));
  svg.setAttribute("height", String(layout.height));

  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 8 8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "4");
  marker.setAttribute("markerWidth", "6");
  marker.setAttribute("markerHeight", "6");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 8 4 L 0 8 z");
  tip.setAttribute("fill", "#94a3b8");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  // edges drawn parent -> child
  for (const edge of layout.edges) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("class", "dag-edge");
    line.setAttribute("x1", String(edge.x1));
    line.setAttribute("y1", String(edge.y1));
    line.setAttribute("x2", String(edge.x2));
    line.setAttribute("y2", String(edge.y2));
    line.setAttribute("stroke", "#94a3b8");
    line.setAttribute("marker-end", "url(#arrow)");
    line.dataset.parent = edge.parent;
    line.dataset.child = edge.child;
    svg.appendChild(line);
  }

  for (const node of layout.nodes) {
    const bead = byId.get(node.id);
    if (!bead) continue;
    const style = CATEGORY_STYLES[node.category];
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", `dag-node cat-${node.category}` + (node.id === selected ? " selected" : ""));
    group.dataset.beadId = node.id;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", node.id === selected ? "11" : "8");
    circle.setAttribute("fill", style.color);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${displayLabel(bead)} (${bead.timestamp})`;
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(node.x));
    text.setAttribute("y", String(node.y + 24));
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("class", "dag-label");
    text.textContent = displayLabel(bead).slice(0, 18);
    group.append(circle, title, text);
    group.addEventListener("click", () => handlers.onSelectBead(node.id));
    svg.appendChild(group);
  }
  container.appendChild(svg);
}

// --- detail panel ------------------------------------------------------------------

export function renderDetail(
  container: HTMLElement,
  bead: ApiBead | null,
  context: { result: ContextResponse; document: string } | null,
  handlers: Handlers,
): void {
  container.textContent = "";
  if (!bead) {
    const hint = document.createElement("p");
    hint.className = "empty-state";
    hint.textContent = "Select an event to inspect it.";
    container.appendChild(hint);
    return;
  }
  const heading = document.createElement("h2");
  heading.textContent = displayLabel(bead);
  container.appendChild(heading);

  const dl = document.createElement("dl");
  dl.className = "detail-fields";
  const rows: Array<[string, string]> = [
    ["id", bead.id],
    ["type", bead.type],
    ["timestamp", bead.timestamp],
    ["author", bead.author],
    ["parents", bead.parents.length ? bead.parents.join("\n") : "(root)"],
    ["signature", bead.signature ? "present" : "absent"],
  ];
  if (bead.clearance) {
    rows.push(["denied roles", bead.clearance.denied_roles.join(", ")]);
  }
  for (const [term, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = term;
    const dd = document.createElement("dd");
    dd.textContent = value;
    dd.dataset.field = term.replace(" ", "-");
    dl.append(dt, dd);
  }
  container.appendChild(dl);

  const content = document.createElement("pre");
  content.className = "detail-content";
  const { fhir: _fhir, ...extracted } = bead.content as Record<string, unknown>;
  content.textContent = JSON.stringify(extracted, null, 2);
  container.appendChild(content);

  const button = document.createElement("button");
  button.id = "retrieve-context";
  button.textContent = "Retrieve context";
  button.addEventListener("click", () => handlers.onRetrieveContext(bead.id));
  container.appendChild(button);

  if (context && context.result.target === bead.id) {
    container.appendChild(renderContext(context.result, context.document, handlers));
  }
}

function renderContext(result: ContextResponse, documentText: string, handlers: Handlers): HTMLElement {
  const section = document.createElement("section");
  section.id = "context-section";
  const heading = document.createElement("h3");
  heading.textContent = `Causal context (depth ${result.depth_used}${result.truncated ? ", truncated" : ""})`;
  section.appendChild(heading);

  const chain = document.createElement("ol");
  chain.id = "context-chain";
  for (const ancestor of result.beads) {
    const item = document.createElement("li");
    item.className = "context-row";
    item.dataset.beadId = ancestor.id;
    item.textContent = `${ancestor.timestamp} — ${displayLabel(ancestor)}`;
    // clicking an ancestor walks the chain further
    item.addEventListener("click", () => handlers.onSelectBead(ancestor.id));
    chain.appendChild(item);
  }
  if (result.beads.length === 0) {
    const none = document.createElement("li");
    none.className = "empty-state";
    none.textContent = "No ancestors within this depth.";
    chain.appendChild(none);
  }
  section.appendChild(chain);

  const doc = document.createElement("pre");
  doc.id = "context-document";
  doc.textContent = documentText;
  section.appendChild(doc);
  return section;
}

// --- controls -------------------------------------------------------------------------

export function renderRoleOptions(select: HTMLSelectElement): void {
  select.textContent = "";
  const none = document.createElement("option");
  none.value = "";
  none.textContent = "(no role)";
  select.appendChild(none);
  for (const role of ROLES) {
    const option = document.createElement("option");
    option.value = role;
    option.textContent = role.replace("_", " ");
    select.appendChild(option);
  }
}

export function parseRole(value: string): Role | null {
  return (ROLES as readonly string[]).includes(value) ? (value as Role) : null;
}
