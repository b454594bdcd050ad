// Thin typed client over the estimation service's HTTP/JSON endpoints.

import type { EstimationConfigDto, FieldError, JobDto } from "./types.js";

export class ApiError extends Error {
  status: number;
  fieldErrors: FieldError[];

  constructor(status: number, message: string, fieldErrors: FieldError[] = []) {
    super(message);
    this.status = status;
    this.fieldErrors = fieldErrors;
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `${resp.status}`;
  let fields: FieldError[] = [];
  try {
    const body = await resp.json();
    if (Array.isArray(body.errors)) {
      fields = body.errors as FieldError[];
      message = fields.map((e) => `${e.field}: ${e.message}`).join("; ");
    } else if (typeof body.error === "string") {
      message = body.error;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(resp.status, message, fields);
}

export interface ApiClient {
  fetchDefaults(): Promise<EstimationConfigDto>;
  submitJob(config: EstimationConfigDto): Promise<string>;
  getJob(id: string): Promise<JobDto>;
  listJobs(): Promise<JobDto[]>;
  fitPilot(csv: string, schema: Record<string, unknown>, kind: string, q: number): Promise<Record<string, unknown>>;
}

export function createApiClient(baseUrl = "", fetchFn: typeof fetch = fetch): ApiClient {
  const get = async (path: string) => {
    const resp = await fetchFn(`${baseUrl}${path}`);
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  };
  const post = async (path: string, body: unknown) => {
    const resp = await fetchFn(`${baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  };
  return {
    async fetchDefaults() {
      return (await get("/api/v1/defaults")) as EstimationConfigDto;
    },
    async submitJob(config) {
      const body = await post("/api/v1/jobs", config);
      return body.id as string;
    },
    async getJob(id) {
      return (await get(`/api/v1/jobs/${id}`)) as JobDto;
    },
    async listJobs() {
      const body = await get("/api/v1/jobs");
      return body.jobs as JobDto[];
    },
    async fitPilot(csv, schema, kind, q) {
      const body = await post("/api/v1/fit", { csv, schema, kind, q });
      return body.fitted_model as Record<string, unknown>;
    },
  };
}
