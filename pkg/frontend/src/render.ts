// Pure HTML/SVG renderers: state in, markup out. No DOM access here, which
// keeps every view testable as plain strings.

import type { ReviewItem, RunHandle, StoreSummary } from "./api.js";
import type { ComparisonGroup, RatioEntry } from "./state.js";

const PHASE_CLASS: Record<string, string> = {
  reconnaissance: "phase-recon",
  scanning: "phase-scan",
  service_detection: "phase-service",
  vulnerability_assessment: "phase-vuln",
  exploitation: "phase-exploit",
  post_exploitation: "phase-post",
};

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChain(item: ReviewItem): string {
  const steps = item.chain
    .map((step) => {
      const cls = PHASE_CLASS[step.phase] ?? "phase-recon";
      return `<span class="step ${cls}" title="${escapeHtml(step.phase)}">${escapeHtml(
        step.kind,
      )}</span>`;
    })
    .join("");
  return `<div class="chain">${steps}</div>`;
}

export function renderReviewQueue(reviews: ReviewItem[]): string {
  if (reviews.length === 0) {
    return `<p class="empty">No pending expertise. Launch a capture run to fill the queue.</p>`;
  }
  const cards = reviews.map((item) => {
    const features = item.fingerprint
      .map((f) => `<code>${escapeHtml(f)}</code>`)
      .join(" ");
    return `
      <article class="review-card" data-record="${escapeHtml(item.record_id)}">
        <header>
          <strong>${escapeHtml(item.record_id)}</strong>
          <span class="target">${escapeHtml(item.target)}</span>
          <span class="outcome">${escapeHtml(item.outcome)}</span>
          <span class="likelihood">L=${item.likelihood.toFixed(4)}</span>
        </header>
        ${renderChain(item)}
        <div class="fingerprint">${features}</div>
        <footer>
          <button class="approve" data-decision="approve">Approve</button>
          <button class="reject" data-decision="reject">Reject</button>
        </footer>
      </article>`;
  });
  return cards.join("\n");
}

export function renderSummary(summary: StoreSummary | null): string {
  if (summary === null) {
    return `<p class="empty">store summary unavailable</p>`;
  }
  const { pending, validated, rejected } = summary.counts;
  const top = summary.top_features
    .slice(0, 6)
    .map((f) => `<li><code>${escapeHtml(f.feature)}</code> × ${f.count}</li>`)
    .join("");
  return `
    <dl class="counts">
      <div><dt>pending</dt><dd id="count-pending">${pending}</dd></div>
      <div><dt>validated</dt><dd id="count-validated">${validated}</dd></div>
      <div><dt>rejected</dt><dd id="count-rejected">${rejected}</dd></div>
    </dl>
    <ul class="top-features">${top}</ul>`;
}

export function renderRunCard(run: RunHandle): string {
  const req = run.request;
  const label = `${req.scenario} · ${req.policy} · ${req.mode} · seed ${req.seed}`;
  let body: string;
  if (run.state === "done" && run.metrics) {
    const m = run.metrics;
    body = `
      <dl class="metrics">
        <div><dt>cost</dt><dd>${m.total_cost}</dd></div>
        <div><dt>coverage</dt><dd>${m.coverage}</dd></div>
        <div><dt>vectors</dt><dd>${m.vectors_extracted}</dd></div>
        <div><dt>compromised</dt><dd>${m.compromised}</dd></div>
      </dl>`;
  } else if (run.state === "failed") {
    body = `<p class="error">${escapeHtml(run.error ?? "failed")}</p>`;
  } else {
    const { steps_completed, estimated_steps } = run.progress;
    body = `<progress max="${Math.max(estimated_steps, 1)}" value="${steps_completed}"></progress>
      <span class="steps">${steps_completed} steps</span>`;
  }
  return `
    <article class="run-card state-${run.state}" data-run="${escapeHtml(run.id)}">
      <header><strong>${escapeHtml(run.id)}</strong> <span class="badge">${run.state}</span></header>
      <p class="label">${escapeHtml(label)}</p>
      ${body}
    </article>`;
}

export function renderRuns(runs: RunHandle[]): string {
  if (runs.length === 0) {
    return `<p class="empty">No runs yet.</p>`;
  }
  return runs.map(renderRunCard).join("\n");
}

export function renderComparisonChart(groups: ComparisonGroup[]): string {
  if (groups.length === 0) {
    return `<p class="empty">Finish runs under several policies to compare them.</p>`;
  }
  const policies = [...new Set(groups.flatMap((g) => [...g.costs.keys()]))].sort();
  const colors: Record<string, string> = {
    blind: "#c0392b",
    expert: "#d69e2e",
    esascf: "#2f855a",
  };
  const width = 640;
  const height = 260;
  const pad = 40;
  const maxCost = Math.max(
    ...groups.flatMap((g) => [...g.costs.values()]),
    1,
  );
  const groupWidth = (width - 2 * pad) / groups.length;
  const barWidth = (groupWidth * 0.8) / Math.max(policies.length, 1);
  const bars: string[] = [];
  groups.forEach((group, gi) => {
    policies.forEach((policy, pi) => {
      const cost = group.costs.get(policy);
      if (cost === undefined) return;
      const h = ((height - 2 * pad) * cost) / maxCost;
      const x = pad + gi * groupWidth + groupWidth * 0.1 + pi * barWidth;
      const y = height - pad - h;
      bars.push(
        `<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" width="${barWidth.toFixed(1)}" ` +
          `height="${h.toFixed(1)}" fill="${colors[policy] ?? "#4a5568"}">` +
          `<title>${policy} @ ${group.machines} machines: ${cost}</title></rect>`,
      );
    });
    bars.push(
      `<text x="${(pad + gi * groupWidth + groupWidth / 2).toFixed(1)}" ` +
        `y="${height - pad + 16}" text-anchor="middle" class="axis">${group.machines}</text>`,
    );
  });
  const legend = policies
    .map(
      (p, i) =>
        `<rect x="${pad + i * 120}" y="8" width="10" height="10" fill="${colors[p] ?? "#4a5568"}"/>` +
        `<text x="${pad + i * 120 + 16}" y="18" class="axis">${p}</text>`,
    )
    .join("");
  return `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="cost per policy per network size">
    ${legend}
    <line x1="${pad}" y1="${height - pad}" x2="${width - pad}" y2="${height - pad}" stroke="#888"/>
    ${bars.join("\n")}
  </svg>`;
}

export function renderRatioTable(ratios: RatioEntry[]): string {
  if (ratios.length === 0) {
    return `<p class="empty">Run a first test and a re-test on the same scenario to see ratios.</p>`;
  }
  const rows = ratios
    .map(
      (r) => `<tr>
        <td>${escapeHtml(r.scenario)}</td>
        <td>${r.firstCost}</td>
        <td>${r.retestCost}</td>
        <td>${r.ratio.toFixed(3)}</td>
      </tr>`,
    )
    .join("");
  return `<table class="ratios">
    <thead><tr><th>scenario</th><th>first run</th><th>re-test</th><th>ratio</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderErrorBanner(error: string | null): string {
  if (!error) return "";
  return `<div class="banner error">${escapeHtml(error)}</div>`;
}
