/** HTML-string rendering for the study pages.
 *
 * Diff coloring comes straight from the server's DiffLine tags; the
 * browser never re-parses patch text.  Model identities are never part
 * of the payload, so nothing here can leak them.
 */

import { ScoreSheet } from "./scores.js";
import { StudyFlow } from "./flow.js";
import {
  AnonymousOutput,
  DiffLine,
  METRICS,
  SCORE_MAX,
  SCORE_MIN,
  StudyItem,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const DIFF_MARKERS: Record<DiffLine["tag"], string> = {
  context: " ",
  deleted: "-",
  added: "+",
};

export function renderDiff(lines: readonly DiffLine[]): string {
  const rows = lines.map(
    (line) =>
      `<div class="diff-line diff-${line.tag}">` +
      `${DIFF_MARKERS[line.tag]}${escapeHtml(line.text)}</div>`,
  );
  return `<pre class="diff">${rows.join("\n")}</pre>`;
}

function renderScoreSelect(
  key: string,
  metric: string,
  current: number | undefined,
): string {
  const options = ["<option value=\"\"></option>"];
  for (let v = SCORE_MIN; v <= SCORE_MAX; v++) {
    const selected = current === v ? " selected" : "";
    options.push(`<option value="${v}"${selected}>${v}</option>`);
  }
  return (
    `<label class="score">${escapeHtml(metric)} ` +
    `<select data-key="${escapeHtml(key)}" data-metric="${escapeHtml(metric)}">` +
    `${options.join("")}</select></label>`
  );
}

export function renderOutputCard(
  output: AnonymousOutput,
  sheet: ScoreSheet,
): string {
  const selects = METRICS.map((metric) =>
    renderScoreSelect(output.key, metric, sheet.getScore(output.key, metric)),
  );
  return (
    `<div class="card" data-key="${escapeHtml(output.key)}">` +
    `<h3>Comment ${escapeHtml(output.key)}</h3>` +
    `<blockquote>${escapeHtml(output.comment)}</blockquote>` +
    `<div class="scores">${selects.join("")}</div></div>`
  );
}

export function renderItem(item: StudyItem, sheet: ScoreSheet): string {
  const cards = item.outputs.map((o) => renderOutputCard(o, sheet)).join("\n");
  const disabled = sheet.isComplete() ? "" : " disabled";
  return `<section class="item" data-item-id="${escapeHtml(item.item_id)}">
<h2>Code Diff</h2>
${renderDiff(item.diff_lines)}
<h2>Code Region</h2>
<pre class="region">${escapeHtml(item.region)}</pre>
<h2>Code Summary</h2>
<p class="summary">${escapeHtml(item.summary)}</p>
<h2>Reference Review</h2>
<blockquote class="ground-truth">${escapeHtml(item.ground_truth)}</blockquote>
<h2>Generated Comments</h2>
${cards}
<div class="progress">${sheet.filledCount} / ${sheet.requiredCount} scores entered</div>
<button id="submit" type="button"${disabled}>Submit ratings</button>
</section>`;
}

export function renderInstructions(text: string): string {
  return `<section class="instructions">
<h2>Instructions</h2>
<pre>${escapeHtml(text)}</pre>
<button id="ack" type="button">I have read the instructions</button>
</section>`;
}

export function renderDone(): string {
  return `<section class="done">
<h2>All done</h2>
<p>You have rated every item assigned to you. Thank you for participating.</p>
</section>`;
}

export function renderError(message: string): string {
  return `<div class="error" role="alert">${escapeHtml(message)} ` +
    `<button id="retry" type="button">Retry</button></div>`;
}

/** Render the whole page for the flow's current state. */
export function renderFlow(flow: StudyFlow): string {
  const banner = flow.error !== null ? renderError(flow.error) : "";
  switch (flow.phase) {
    case "loading":
      return `${banner}<p class="loading">Loading…</p>`;
    case "instructions":
      return banner + renderInstructions(flow.instructionsText);
    case "rating":
      if (flow.item === null || flow.sheet === null) {
        throw new Error("rating phase without an item");
      }
      return banner + renderItem(flow.item, flow.sheet);
    case "done":
      return banner + renderDone();
  }
}
