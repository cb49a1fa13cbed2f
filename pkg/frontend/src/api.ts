// Thin typed client over the engine's HTTP API. The UI holds no data the
// API did not serve; every view is rebuilt from these calls.

import type {
  ContextResponse,
  PatientBeadsResponse,
  PatientSummary,
  Role,
} from "./types.js";

export type FetchLike = (input: string) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input) => fetch(input),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      const body = await response.json().catch(() => ({}));
      throw new ApiError(response.status, body.code ?? "error", body.message ?? response.statusText);
    }
    return (await response.json()) as T;
  }

  private async getText(path: string): Promise<string> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) throw new ApiError(response.status, "error", response.statusText);
    return response.text();
  }

  listPatients(): Promise<PatientSummary[]> {
    return this.getJson<PatientSummary[]>("/patients");
  }

  patientBeads(patientId: string, role: Role | null): Promise<PatientBeadsResponse> {
    const params = new URLSearchParams();
    if (role) params.set("role", role);
    const query = params.toString();
    return this.getJson<PatientBeadsResponse>(
      `/patients/${patientId}/beads${query ? "?" + query : ""}`,
    );
  }

  context(beadId: string, depth: number, role: Role | null): Promise<ContextResponse> {
    return this.getJson<ContextResponse>(this.contextPath(beadId, depth, role, "json"));
  }

  contextDocument(beadId: string, depth: number, role: Role | null): Promise<string> {
    return this.getText(this.contextPath(beadId, depth, role, "text"));
  }

  private contextPath(beadId: string, depth: number, role: Role | null, format: "json" | "text"): string {
    const params = new URLSearchParams({ id: beadId, depth: String(depth) });
    if (role) params.set("role", role);
    if (format !== "json") params.set("format", format);
    return `/beads/context?${params.toString()}`;
  }
}
