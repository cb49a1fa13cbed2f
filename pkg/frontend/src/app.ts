// Application controller: owns the view state and the loaded data, talks
// to the API, and re-renders panels on every change. Responses that
// arrive for a superseded selection are discarded via request tokens.

import { ApiClient } from "./api.js";
import {
  initialState,
  selectBead,
  selectPatient,
  setContextDepth,
  setRole,
  setViewMode,
  type ViewMode,
  type ViewState,
} from "./state.js";
import {
  renderDetail,
  renderGraphView,
  renderListView,
  renderPatientList,
  renderRoleOptions,
  parseRole,
  type Handlers,
} from "./render.js";
import type { ApiBead, ContextResponse, EdgeDto, PatientSummary } from "./types.js";

interface Elements {
  patientSearch: HTMLInputElement;
  patientList: HTMLElement;
  viewListBtn: HTMLButtonElement;
  viewGraphBtn: HTMLButtonElement;
  timeline: HTMLElement;
  detail: HTMLElement;
  roleSelect: HTMLSelectElement;
  depthSlider: HTMLInputElement;
  depthValue: HTMLElement;
}

export class App {
  state: ViewState = initialState();
  patients: PatientSummary[] = [];
  beads: ApiBead[] = [];
  edges: EdgeDto[] = [];
  context: { result: ContextResponse; document: string } | null = null;
  searchQuery = "";

  private els: Elements;
  private beadsToken = 0;
  private contextToken = 0;
  private handlers: Handlers;
  /** resolves when the latest fetch chain settles; tests await this */
  idle: Promise<void> = Promise.resolve();

  constructor(root: Document, private api: ApiClient) {
    this.els = {
      patientSearch: must(root, "#patient-search"),
      patientList: must(root, "#patient-list"),
      viewListBtn: must(root, "#view-list-btn"),
      viewGraphBtn: must(root, "#view-graph-btn"),
      timeline: must(root, "#timeline-container"),
      detail: must(root, "#detail-panel"),
      roleSelect: must(root, "#role-select"),
      depthSlider: must(root, "#depth-slider"),
      depthValue: must(root, "#depth-value"),
    };
    this.handlers = {
      onSelectPatient: (id) => this.selectPatient(id),
      onSelectBead: (id) => this.selectBead(id),
      onRetrieveContext: (id) => this.retrieveContext(id),
    };
    renderRoleOptions(this.els.roleSelect);
    this.els.patientSearch.addEventListener("input", () => {
      this.searchQuery = this.els.patientSearch.value;
      this.renderPatients();
    });
    this.els.viewListBtn.addEventListener("click", () => this.setViewMode("list"));
    this.els.viewGraphBtn.addEventListener("click", () => this.setViewMode("graph"));
    this.els.roleSelect.addEventListener("change", () => {
      this.idle = this.applyRole(parseRole(this.els.roleSelect.value));
    });
    this.els.depthSlider.addEventListener("input", () => {
      this.state = setContextDepth(this.state, Number(this.els.depthSlider.value));
      this.els.depthValue.textContent = String(this.state.contextDepth);
    });
  }

  visibleIds(): Set<string> {
    return new Set(this.beads.map((b) => b.id));
  }

  async start(): Promise<void> {
    this.patients = await this.api.listPatients();
    this.renderPatients();
  }

  selectPatient(patientId: string): void {
    this.state = selectPatient(this.state, patientId);
    this.context = null;
    this.renderPatients();
    this.idle = this.loadBeads();
  }

  private async loadBeads(): Promise<void> {
    const patient = this.state.selectedPatient;
    if (!patient) return;
    const token = ++this.beadsToken;
    const response = await this.api.patientBeads(patient, this.state.activeRole);
    if (token !== this.beadsToken) return; // superseded selection
    this.beads = response.beads;
    this.edges = response.edges;
    this.renderTimeline();
    this.renderDetailPanel();
  }

  setViewMode(mode: ViewMode): void {
    this.state = setViewMode(this.state, mode);
    this.renderTimeline();
  }

  selectBead(beadId: string): void {
    this.state = selectBead(this.state, beadId, this.visibleIds());
    if (this.context && this.context.result.target !== this.state.selectedBead) {
      this.context = null;
    }
    this.renderTimeline();
    this.renderDetailPanel();
  }

  async applyRole(role: ReturnType<typeof parseRole>): Promise<void> {
    const patient = this.state.selectedPatient;
    this.state = { ...this.state, activeRole: role };
    if (!patient) return;
    const token = ++this.beadsToken;
    const response = await this.api.patientBeads(patient, role);
    if (token !== this.beadsToken) return;
    this.beads = response.beads;
    this.edges = response.edges;
    const visible = new Set(this.beads.map((b) => b.id));
    this.state = setRole(this.state, role, visible);
    if (this.context && this.context.result.target !== this.state.selectedBead) {
      this.context = null;
    }
    this.renderTimeline();
    this.renderDetailPanel();
  }

  retrieveContext(beadId: string): void {
    this.idle = (async () => {
      const token = ++this.contextToken;
      const { contextDepth, activeRole } = this.state;
      const [result, documentText] = await Promise.all([
        this.api.context(beadId, contextDepth, activeRole),
        this.api.contextDocument(beadId, contextDepth, activeRole),
      ]);
      if (token !== this.contextToken) return;
      this.context = { result, document: documentText };
      this.renderDetailPanel();
    })();
  }

  // --- rendering ------------------------------------------------------------

  renderPatients(): void {
    renderPatientList(
      this.els.patientList,
      this.patients,
      this.searchQuery,
      this.state.selectedPatient,
      this.handlers,
    );
  }

  renderTimeline(): void {
    this.els.viewListBtn.classList.toggle("active", this.state.viewMode === "list");
    this.els.viewGraphBtn.classList.toggle("active", this.state.viewMode === "graph");
    if (this.state.viewMode === "list") {
      renderListView(this.els.timeline, this.beads, this.state.selectedBead, this.handlers);
    } else {
      renderGraphView(this.els.timeline, this.beads, this.edges, this.state.selectedBead, this.handlers);
    }
  }

  renderDetailPanel(): void {
    const bead = this.beads.find((b) => b.id === this.state.selectedBead) ?? null;
    renderDetail(this.els.detail, bead, this.context, this.handlers);
  }
}

function must<T extends HTMLElement>(root: Document, selector: string): T {
  const el = root.querySelector(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el as T;
}
