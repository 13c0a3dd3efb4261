import { describe, expect, it } from "vitest";

import type { ReviewItem, RunHandle } from "../src/api.js";
import {
  activeRuns,
  comparisonGroups,
  initialState,
  upsertRun,
  withDecision,
  withError,
  withReviews,
} from "../src/state.js";

const review = (id: string): ReviewItem => ({
  record_id: id,
  target: "m001",
  fingerprint: ["OS_Family=linux"],
  outcome: "assessed",
  likelihood: 0.5,
  status: "pending",
  chain: [{ kind: "Ping", phase: "reconnaissance", params: {} }],
});

const run = (id: string, state: RunHandle["state"]): RunHandle => ({
  id,
  state,
  request: { scenario: "lab", policy: "esascf", mode: "PT", seed: 1, change_fraction: null },
  progress: { steps_completed: 0, estimated_steps: 0 },
  error: null,
});

describe("state reducers", () => {
  it("decision removes the record and remembers the acknowledgement", () => {
    let state = withReviews(initialState(), [review("r1"), review("r2")]);
    state = withDecision(state, "r1", "validated");
    expect(state.reviews.map((r) => r.record_id)).toEqual(["r2"]);
    expect(state.lastDecision).toBe("r1 validated");
  });

  it("withReviews clears a previous error", () => {
    let state = withError(initialState(), "offline");
    expect(state.error).toBe("offline");
    state = withReviews(state, []);
    expect(state.error).toBeNull();
  });

  it("upsertRun replaces by id and keeps order", () => {
    let state = upsertRun(initialState(), run("a", "queued"));
    state = upsertRun(state, run("b", "queued"));
    state = upsertRun(state, { ...run("a", "running") });
    expect(state.runs.map((r) => [r.id, r.state])).toEqual([
      ["a", "running"],
      ["b", "queued"],
    ]);
  });

  it("activeRuns selects queued and running only", () => {
    let state = upsertRun(initialState(), run("a", "done"));
    state = upsertRun(state, run("b", "running"));
    state = upsertRun(state, run("c", "failed"));
    expect(activeRuns(state).map((r) => r.id)).toEqual(["b"]);
  });

  it("comparisonGroups ignores unfinished runs", () => {
    expect(comparisonGroups([run("a", "running")])).toEqual([]);
  });
});
