// Console state and pure update helpers. All mutations flow through these
// reducers so the view is reconstructible from API responses alone.

import type { ReviewItem, RunHandle, StoreSummary } from "./api.js";

export interface ConsoleState {
  reviews: ReviewItem[];
  runs: RunHandle[];
  summary: StoreSummary | null;
  lastDecision: string | null;
  error: string | null;
}

export function initialState(): ConsoleState {
  return { reviews: [], runs: [], summary: null, lastDecision: null, error: null };
}

export function withReviews(state: ConsoleState, reviews: ReviewItem[]): ConsoleState {
  return { ...state, reviews, error: null };
}

export function withSummary(state: ConsoleState, summary: StoreSummary): ConsoleState {
  return { ...state, summary, error: null };
}

export function withError(state: ConsoleState, error: string): ConsoleState {
  return { ...state, error };
}

export function withDecision(
  state: ConsoleState,
  recordId: string,
  status: string,
): ConsoleState {
  return {
    ...state,
    reviews: state.reviews.filter((r) => r.record_id !== recordId),
    lastDecision: `${recordId} ${status}`,
  };
}

export function upsertRun(state: ConsoleState, run: RunHandle): ConsoleState {
  const runs = state.runs.some((r) => r.id === run.id)
    ? state.runs.map((r) => (r.id === run.id ? run : r))
    : [...state.runs, run];
  return { ...state, runs };
}

export function activeRuns(state: ConsoleState): RunHandle[] {
  return state.runs.filter((r) => r.state === "queued" || r.state === "running");
}

export interface ComparisonGroup {
  machines: number;
  costs: Map<string, number>; // policy -> mean cost, exactly as reported
}

/** Group finished runs into chart data: mean cost per policy per network
 * size. Values are API-reported costs; no client-side rounding. */
export function comparisonGroups(runs: RunHandle[]): ComparisonGroup[] {
  const bucket = new Map<number, Map<string, number[]>>();
  for (const run of runs) {
    if (run.state !== "done" || !run.metrics) continue;
    const size = run.metrics.machines;
    if (!bucket.has(size)) bucket.set(size, new Map());
    const byPolicy = bucket.get(size)!;
    const list = byPolicy.get(run.request.policy) ?? [];
    list.push(run.metrics.total_cost);
    byPolicy.set(run.request.policy, list);
  }
  return [...bucket.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([machines, byPolicy]) => ({
      machines,
      costs: new Map(
        [...byPolicy.entries()]
          .sort()
          .map(([policy, costs]) => [
            policy,
            costs.reduce((s, c) => s + c, 0) / costs.length,
          ]),
      ),
    }));
}

export interface RatioEntry {
  scenario: string;
  firstCost: number;
  retestCost: number;
  ratio: number;
}

/** Pair first runs (no change fraction) with re-tests on the same scenario;
 * later runs win within each side. */
export function retestRatios(runs: RunHandle[]): RatioEntry[] {
  const firsts = new Map<string, number>();
  const retests = new Map<string, number>();
  for (const run of runs) {
    if (run.state !== "done" || !run.metrics || run.request.policy !== "esascf") {
      continue;
    }
    const target =
      run.request.change_fraction == null || run.request.change_fraction === 0
        ? firsts
        : retests;
    target.set(run.request.scenario, run.metrics.total_cost);
  }
  const out: RatioEntry[] = [];
  for (const [scenario, firstCost] of [...firsts.entries()].sort()) {
    const retestCost = retests.get(scenario);
    if (retestCost !== undefined && firstCost > 0) {
      out.push({ scenario, firstCost, retestCost, ratio: retestCost / firstCost });
    }
  }
  return out;
}
