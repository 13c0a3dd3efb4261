// Typed client over the compliance service's JSON endpoints.
// Every console datum originates here; the client invents no state.

export interface ChainStep {
  kind: string;
  phase: string;
  params: Record<string, unknown>;
}

export interface ReviewItem {
  record_id: string;
  target: string;
  fingerprint: string[];
  outcome: string;
  likelihood: number;
  chain: ChainStep[];
  status: string;
}

export interface RunProgress {
  steps_completed: number;
  estimated_steps: number;
}

export interface RunMetrics {
  total_cost: number;
  coverage: number;
  vectors_extracted: number;
  compromised: number;
  steps: number;
  machines: number;
  budget_exhausted: boolean;
}

export interface RunHandle {
  id: string;
  state: "queued" | "running" | "done" | "failed";
  request: {
    scenario: string;
    policy: string;
    mode: string;
    seed: number;
    change_fraction: number | null;
  };
  progress: RunProgress;
  error: string | null;
  metrics?: RunMetrics;
}

export interface StoreSummary {
  counts: { pending: number; validated: number; rejected: number };
  records: number;
  top_features: { feature: string; count: number }[];
}

export interface RunRequest {
  scenario: string;
  policy: string;
  mode: string;
  seed: number;
  change_fraction?: number | null;
  auto_approve?: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof body === "object" && body !== null && "detail" in body
        ? String((body as { detail: unknown }).detail)
        : response.statusText;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export const api = {
  scenarios: () =>
    request<{ scenarios: string[] }>("/scenarios").then((d) => d.scenarios),

  reviews: () =>
    request<{ reviews: ReviewItem[] }>("/reviews").then((d) => d.reviews),

  decide: (recordId: string, decision: "approve" | "reject", reviewer: string) =>
    request<{ record_id: string; status: string }>(
      `/reviews/${recordId}/decision`,
      { method: "POST", body: JSON.stringify({ decision, reviewer }) },
    ),

  startRun: (req: RunRequest) =>
    request<RunHandle>("/runs", { method: "POST", body: JSON.stringify(req) }),

  run: (id: string) => request<RunHandle>(`/runs/${id}`),

  summary: () => request<StoreSummary>("/store/summary"),
};
