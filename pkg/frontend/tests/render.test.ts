import { describe, expect, it } from "vitest";

import { StudyApiClient } from "../src/api.js";
import { MemoryStorage, StudyFlow } from "../src/flow.js";
import {
  escapeHtml,
  renderDiff,
  renderError,
  renderFlow,
  renderInstructions,
  renderItem,
} from "../src/render.js";
import { ScoreSheet } from "../src/scores.js";
import { DiffLine, METRICS, StudyItem } from "../src/types.js";
import { FakeStudyServer, makeItems } from "./fake_server.js";

const ITEM: StudyItem = {
  item_id: "item-7",
  diff_lines: [
    { tag: "context", text: "def f(x):" },
    { tag: "deleted", text: "    return x" },
    { tag: "added", text: "    return x + 1" },
  ],
  region: "def f(x):\n    return x",
  summary: "function f returns its argument",
  ground_truth: "off by one <here>",
  outputs: [
    { key: "A", comment: "consider x + 1" },
    { key: "B", comment: "use <b>bold</b> names" },
  ],
};

describe("escapeHtml", () => {
  it("neutralises markup-significant characters", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });
});

describe("renderDiff", () => {
  it("colors lines from the server tags, not by re-parsing text", () => {
    const lines: DiffLine[] = [
      // Deliberately misleading text: a deleted line starting with "+".
      { tag: "deleted", text: "+looks added but is deleted" },
      { tag: "added", text: "-looks deleted but is added" },
      { tag: "context", text: "plain" },
    ];
    const html = renderDiff(lines);
    expect(html).toContain(
      '<div class="diff-line diff-deleted">-+looks added but is deleted</div>',
    );
    expect(html).toContain(
      '<div class="diff-line diff-added">+-looks deleted but is added</div>',
    );
    expect(html).toContain('<div class="diff-line diff-context"> plain</div>');
  });
});

describe("renderItem", () => {
  it("shows region, summary, ground truth, and one card per output", () => {
    const sheet = new ScoreSheet(["A", "B"]);
    const html = renderItem(ITEM, sheet);
    expect(html).toContain("function f returns its argument");
    expect(html).toContain("off by one &lt;here&gt;");
    expect(html).toContain('data-key="A"');
    expect(html).toContain('data-key="B"');
    expect(html).toContain("use &lt;b&gt;bold&lt;/b&gt; names");
    expect((html.match(/<div class="card"/g) ?? []).length).toBe(2);
  });

  it("disables submit until the sheet is complete", () => {
    const sheet = new ScoreSheet(["A", "B"]);
    expect(renderItem(ITEM, sheet)).toContain("disabled>Submit");
    for (const key of ["A", "B"]) {
      for (const metric of METRICS) {
        sheet.setScore(key, metric, 4);
      }
    }
    const html = renderItem(ITEM, sheet);
    expect(html).not.toContain("disabled>Submit");
    expect(html).toContain("6 / 6 scores entered");
  });

  it("marks the current score as selected", () => {
    const sheet = new ScoreSheet(["A", "B"]);
    sheet.setScore("A", "relevance", 3);
    expect(renderItem(ITEM, sheet)).toContain('<option value="3" selected>3</option>');
  });
});

describe("renderFlow", () => {
  it("renders each phase and never leaks model names", async () => {
    const server = new FakeStudyServer(
      makeItems(1, ["model-x", "model-y"]),
      new Set(["tok-1"]),
    );
    const flow = new StudyFlow(
      new StudyApiClient("", server.fetch),
      "tok-1",
      new MemoryStorage(),
    );
    await flow.start();
    expect(renderFlow(flow)).toContain("I have read the instructions");
    await flow.acknowledge();
    const ratingHtml = renderFlow(flow);
    expect(ratingHtml).toContain("Submit ratings");
    expect(ratingHtml).not.toContain("model-x");
    expect(ratingHtml).not.toContain("model-y");
    for (const output of flow.item!.outputs) {
      for (const metric of METRICS) {
        flow.setScore(output.key, metric, 5);
      }
    }
    await flow.submit();
    expect(renderFlow(flow)).toContain("All done");
  });

  it("prefixes an error banner with a retry control", () => {
    const html = renderError("server error (500): boom");
    expect(html).toContain('role="alert"');
    expect(html).toContain("server error (500): boom");
    expect(html).toContain('<button id="retry"');
  });

  it("escapes instruction text", () => {
    expect(renderInstructions("a < b")).toContain("a &lt; b");
  });
});
