import { describe, expect, it } from "vitest";

import type { ReviewItem, RunHandle, StoreSummary } from "../src/api.js";
import {
  renderChain,
  renderComparisonChart,
  renderErrorBanner,
  renderRatioTable,
  renderReviewQueue,
  renderRunCard,
  renderSummary,
} from "../src/render.js";
import { comparisonGroups, retestRatios } from "../src/state.js";

const item: ReviewItem = {
  record_id: "r000001",
  target: "m003",
  fingerprint: ["OS_Family=linux", "Service_Name=smbd"],
  outcome: "compromised:root",
  likelihood: 0.7312,
  status: "pending",
  chain: [
    { kind: "Ping", phase: "reconnaissance", params: {} },
    { kind: "PortScan", phase: "scanning", params: { ports: [[445, 445]] } },
    { kind: "ServiceDetect", phase: "service_detection", params: { port: 445 } },
    { kind: "Exploit", phase: "exploitation", params: { exploit: "EXP-1" } },
  ],
};

function doneRun(
  id: string,
  policy: string,
  machines: number,
  cost: number,
  extra: Partial<RunHandle["request"]> = {},
): RunHandle {
  return {
    id,
    state: "done",
    request: {
      scenario: "lab",
      policy,
      mode: "PT",
      seed: 1,
      change_fraction: null,
      ...extra,
    },
    progress: { steps_completed: 10, estimated_steps: 10 },
    error: null,
    metrics: {
      total_cost: cost,
      coverage: 1.0,
      vectors_extracted: 4,
      compromised: 1,
      steps: 10,
      machines,
      budget_exhausted: false,
    },
  };
}

describe("review queue rendering", () => {
  it("shows an explicit empty state", () => {
    expect(renderReviewQueue([])).toContain("No pending expertise");
  });

  it("renders one phase-labelled step per chain entry", () => {
    const html = renderChain(item);
    expect(html.match(/class="step /g)).toHaveLength(4);
    expect(html).toContain("phase-recon");
    expect(html).toContain("phase-scan");
    expect(html).toContain("phase-service");
    expect(html).toContain("phase-exploit");
  });

  it("renders approve and reject buttons per card", () => {
    const html = renderReviewQueue([item]);
    expect(html).toContain('data-record="r000001"');
    expect(html).toContain('data-decision="approve"');
    expect(html).toContain('data-decision="reject"');
    expect(html).toContain("L=0.7312");
  });

  it("escapes html in api-provided fields", () => {
    const hostile = { ...item, target: "<img src=x>" };
    expect(renderReviewQueue([hostile])).not.toContain("<img");
  });
});

describe("run cards", () => {
  it("shows metrics when done", () => {
    const html = renderRunCard(doneRun("run-0001", "esascf", 20, 123.5));
    expect(html).toContain("123.5");
    expect(html).toContain("coverage");
    expect(html).toContain("state-done");
  });

  it("shows progress while running", () => {
    const run: RunHandle = {
      ...doneRun("run-0002", "blind", 20, 0),
      state: "running",
      metrics: undefined,
      progress: { steps_completed: 7, estimated_steps: 100 },
    };
    const html = renderRunCard(run);
    expect(html).toContain("<progress");
    expect(html).toContain("7 steps");
  });

  it("surfaces failure text verbatim", () => {
    const run: RunHandle = {
      ...doneRun("run-0003", "blind", 20, 0),
      state: "failed",
      metrics: undefined,
      error: "409: another run is using the expertise store",
    };
    expect(renderRunCard(run)).toContain("409: another run is using the expertise store");
  });
});

describe("summary", () => {
  it("renders counts from the api", () => {
    const summary: StoreSummary = {
      counts: { pending: 3, validated: 9, rejected: 1 },
      records: 13,
      top_features: [{ feature: "OS_Family=linux", count: 9 }],
    };
    const html = renderSummary(summary);
    expect(html).toContain('id="count-validated">9<');
    expect(html).toContain("OS_Family=linux");
  });
});

describe("comparison chart", () => {
  it("renders an empty placeholder without data", () => {
    expect(renderComparisonChart([])).toContain("Finish runs");
  });

  it("renders one bar group per size and one bar per policy", () => {
    const runs = [
      doneRun("a", "blind", 10, 6000),
      doneRun("b", "expert", 10, 800),
      doneRun("c", "esascf", 10, 150),
      doneRun("d", "blind", 50, 33000),
      doneRun("e", "expert", 50, 4000),
      doneRun("f", "esascf", 50, 700),
    ];
    const svg = renderComparisonChart(comparisonGroups(runs));
    expect(svg.match(/<rect /g)!.length).toBeGreaterThanOrEqual(6);
    expect(svg).toContain(">10</text>");
    expect(svg).toContain(">50</text>");
    // values flow through exactly as reported
    expect(svg).toContain("esascf @ 10 machines: 150");
  });
});

describe("ratio table", () => {
  it("pairs first runs with re-tests on the same scenario", () => {
    const runs = [
      doneRun("a", "esascf", 20, 1000),
      doneRun("b", "esascf", 20, 180, { change_fraction: 0.25 }),
    ];
    const ratios = retestRatios(runs);
    expect(ratios).toHaveLength(1);
    expect(ratios[0].ratio).toBeCloseTo(0.18, 10);
    const html = renderRatioTable(ratios);
    expect(html).toContain("<td>1000</td>");
    expect(html).toContain("<td>180</td>");
    expect(html).toContain("0.180");
  });

  it("renders a placeholder without pairs", () => {
    expect(renderRatioTable([])).toContain("Run a first test");
  });
});

describe("error banner", () => {
  it("is empty without an error", () => {
    expect(renderErrorBanner(null)).toBe("");
  });

  it("escapes and shows the message", () => {
    expect(renderErrorBanner("boom & crash")).toContain("boom &amp; crash");
  });
});
