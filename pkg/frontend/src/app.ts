// DOM glue: wires the API client, reducers and renderers together and polls
// active runs once per second. The console holds no state of its own beyond
// what the API returns; a reload reconstructs the identical view.

import { api, ApiError, RunRequest } from "./api.js";
import {
  ConsoleState,
  activeRuns,
  comparisonGroups,
  initialState,
  retestRatios,
  upsertRun,
  withDecision,
  withError,
  withReviews,
  withSummary,
} from "./state.js";
import {
  renderComparisonChart,
  renderErrorBanner,
  renderRatioTable,
  renderReviewQueue,
  renderRuns,
  renderSummary,
} from "./render.js";

let state: ConsoleState = initialState();

const el = (id: string) => document.getElementById(id)!;

function paint(): void {
  el("banner").innerHTML = renderErrorBanner(state.error);
  el("queue").innerHTML = renderReviewQueue(state.reviews);
  el("summary").innerHTML = renderSummary(state.summary);
  el("runs").innerHTML = renderRuns(state.runs);
  const done = state.runs;
  el("chart").innerHTML = renderComparisonChart(comparisonGroups(done));
  el("ratios").innerHTML = renderRatioTable(retestRatios(done));
  el("ack").textContent = state.lastDecision ?? "";
}

async function refreshReviews(): Promise<void> {
  try {
    state = withReviews(state, await api.reviews());
    state = withSummary(state, await api.summary());
  } catch (err) {
    state = withError(state, describe(err));
  }
  paint();
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return `connection error: ${err.message}`;
  return String(err);
}

async function decide(recordId: string, decision: "approve" | "reject"): Promise<void> {
  try {
    const result = await api.decide(recordId, decision, "console");
    state = withDecision(state, recordId, result.status);
    state = withSummary(state, await api.summary());
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      await refreshReviews(); // stale item: someone else decided first
      return;
    }
    state = withError(state, describe(err));
  }
  paint();
}

async function launchRun(form: HTMLFormElement): Promise<void> {
  const data = new FormData(form);
  const fraction = String(data.get("change_fraction") ?? "").trim();
  const request: RunRequest = {
    scenario: String(data.get("scenario")),
    policy: String(data.get("policy")),
    mode: String(data.get("mode")),
    seed: Number(data.get("seed") || 0),
    change_fraction: fraction === "" ? null : Number(fraction),
    auto_approve: data.get("auto_approve") === "on",
  };
  try {
    const handle = await api.startRun(request);
    state = upsertRun(state, handle);
    state = { ...state, error: null };
  } catch (err) {
    state = withError(state, describe(err)); // 400/404/409 verbatim, no card
  }
  paint();
}

async function pollRuns(): Promise<void> {
  const pending = activeRuns(state);
  for (const run of pending) {
    try {
      const fresh = await api.run(run.id);
      state = upsertRun(state, fresh);
      if (fresh.state === "done") {
        state = withSummary(state, await api.summary());
        state = withReviews(state, await api.reviews());
      }
    } catch (err) {
      state = withError(state, describe(err));
    }
  }
  if (pending.length > 0) paint();
}

async function populateScenarios(): Promise<void> {
  try {
    const names = await api.scenarios();
    const select = el("scenario-select") as HTMLSelectElement;
    select.innerHTML = names
      .map((n) => `<option value="${n}">${n}</option>`)
      .join("");
  } catch (err) {
    state = withError(state, describe(err));
    paint();
  }
}

export function boot(): void {
  el("queue").addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button[data-decision]");
    if (!button) return;
    const card = button.closest("[data-record]") as HTMLElement;
    void decide(
      card.dataset.record!,
      button.getAttribute("data-decision") as "approve" | "reject",
    );
  });
  (el("run-form") as HTMLFormElement).addEventListener("submit", (event) => {
    event.preventDefault();
    void launchRun(event.target as HTMLFormElement);
  });
  el("refresh").addEventListener("click", () => void refreshReviews());
  void populateScenarios();
  void refreshReviews();
  window.setInterval(() => void pollRuns(), 1000);
}

if (typeof document !== "undefined" && document.getElementById("queue")) {
  boot();
}
