// View state and its pure transitions. Invariants enforced here:
// a selected bead always belongs to the selected patient's loaded
// subgraph, and switching view modes never drops the selection.

import type { Role } from "./types.js";

export type ViewMode = "list" | "graph";

export interface ViewState {
  selectedPatient: string | null;
  viewMode: ViewMode;
  selectedBead: string | null;
  activeRole: Role | null;
  contextDepth: number;
}

export const DEFAULT_DEPTH = 5;
export const MAX_DEPTH = 100;

export function initialState(): ViewState {
  return {
    selectedPatient: null,
    viewMode: "list",
    selectedBead: null,
    activeRole: null,
    contextDepth: DEFAULT_DEPTH,
  };
}

export function selectPatient(state: ViewState, patientId: string | null): ViewState {
  if (patientId === state.selectedPatient) return state;
  return { ...state, selectedPatient: patientId, selectedBead: null };
}

export function setViewMode(state: ViewState, mode: ViewMode): ViewState {
  return { ...state, viewMode: mode };
}

/** Select a bead; ignores ids outside the currently visible subgraph. */
export function selectBead(
  state: ViewState,
  beadId: string | null,
  visibleIds: ReadonlySet<string>,
): ViewState {
  if (beadId !== null && !visibleIds.has(beadId)) return state;
  return { ...state, selectedBead: beadId };
}

/** Role switches re-fetch; a selection that became invisible is dropped. */
export function setRole(
  state: ViewState,
  role: Role | null,
  visibleAfterSwitch: ReadonlySet<string>,
): ViewState {
  const keepSelection =
    state.selectedBead !== null && visibleAfterSwitch.has(state.selectedBead);
  return {
    ...state,
    activeRole: role,
    selectedBead: keepSelection ? state.selectedBead : null,
  };
}

export function setContextDepth(state: ViewState, depth: number): ViewState {
  const clamped = Math.min(MAX_DEPTH, Math.max(1, Math.round(depth)));
  return { ...state, contextDepth: clamped };
}
