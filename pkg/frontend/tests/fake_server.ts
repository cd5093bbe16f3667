/** In-memory stand-in for the study service.
 *
 * Implements the FetchLike interface so the client and flow can be
 * exercised without sockets, while mirroring the server's semantics:
 * token auth, the instructions-acknowledgement gate, sticky
 * assignments, the two-raters-per-item cap, full-coverage rating
 * validation, and duplicate-submission conflicts.  Error bodies use
 * the same {"detail": ...} shape as the real service.
 */

import { FetchLike } from "../src/api.js";
import { DiffLine, METRICS, SCORE_MAX, SCORE_MIN } from "../src/types.js";

export const RATERS_PER_ITEM = 2;

export interface FakeItem {
  item_id: string;
  diff_lines: DiffLine[];
  region: string;
  summary: string;
  ground_truth: string;
  /** anonymous key -> real model name; must never leave the server */
  key_map: Record<string, string>;
  comments: Record<string, string>;
}

interface StoredRating {
  model: string;
  relevance: number;
  information: number;
  clarity: number;
}

function response(status: number, body: unknown): ReturnType<FetchLike> {
  return Promise.resolve({
    status,
    json: () => Promise.resolve(JSON.parse(JSON.stringify(body))),
  });
}

export class FakeStudyServer {
  readonly instructions = "Rate each generated comment from 0 to 5.";
  readonly adminToken = "admin-secret";
  /** Force the next N requests to fail with a 500 (for retry tests). */
  failNextRequests = 0;
  requestLog: string[] = [];

  private readonly acked = new Set<string>();
  private readonly assignments = new Map<string, string>();
  private readonly completed = new Map<string, Set<string>>();
  private readonly raterCount = new Map<string, number>();
  private readonly ratings: StoredRating[] = [];

  constructor(
    private readonly items: FakeItem[],
    private readonly tokens: Set<string>,
  ) {}

  get fetch(): FetchLike {
    return (url, init) => this.handle(url, init);
  }

  private handle(
    url: string,
    init?: { method?: string; body?: string },
  ): ReturnType<FetchLike> {
    const method = init?.method ?? "GET";
    const [path, queryString] = url.split("?", 2);
    const query = new URLSearchParams(queryString ?? "");
    this.requestLog.push(`${method} ${path}`);
    if (this.failNextRequests > 0) {
      this.failNextRequests--;
      return response(500, { detail: "internal server error" });
    }
    const body = init?.body !== undefined ? JSON.parse(init.body) : {};
    if (method === "GET" && path === "/api/instructions") {
      return response(200, { instructions: this.instructions });
    }
    if (method === "POST" && path === "/api/instructions/ack") {
      return this.acknowledge(body.token);
    }
    if (method === "GET" && path === "/api/next-item") {
      return this.nextItem(query.get("token") ?? "");
    }
    if (method === "POST" && path === "/api/ratings") {
      return this.submit(body.token, body.item_id, body.ratings);
    }
    if (method === "GET" && path === "/api/report") {
      return this.report(query.get("admin_token") ?? "");
    }
    return response(404, { detail: "not found" });
  }

  private acknowledge(token: string): ReturnType<FetchLike> {
    if (!this.tokens.has(token)) {
      return response(401, { detail: "unknown participant token" });
    }
    this.acked.add(token);
    return response(200, { status: "ok" });
  }

  private nextItem(token: string): ReturnType<FetchLike> {
    if (!this.tokens.has(token)) {
      return response(401, { detail: "unknown participant token" });
    }
    if (!this.acked.has(token)) {
      return response(403, {
        detail: "instructions must be acknowledged first",
      });
    }
    const current = this.assignments.get(token);
    let item = current !== undefined
      ? this.items.find((i) => i.item_id === current)
      : undefined;
    if (item === undefined) {
      const done = this.completed.get(token) ?? new Set<string>();
      item = this.items.find(
        (i) =>
          !done.has(i.item_id) &&
          (this.raterCount.get(i.item_id) ?? 0) < RATERS_PER_ITEM,
      );
      if (item === undefined) {
        return response(200, { done: true, item: null });
      }
      this.assignments.set(token, item.item_id);
      this.raterCount.set(
        item.item_id,
        (this.raterCount.get(item.item_id) ?? 0) + 1,
      );
    }
    return response(200, {
      done: false,
      item: {
        item_id: item.item_id,
        diff_lines: item.diff_lines,
        region: item.region,
        summary: item.summary,
        ground_truth: item.ground_truth,
        outputs: Object.entries(item.comments).map(([key, comment]) => ({
          key,
          comment,
        })),
      },
    });
  }

  private submit(
    token: string,
    itemId: string,
    ratings: { key: string; relevance: number; information: number; clarity: number }[],
  ): ReturnType<FetchLike> {
    if (!this.tokens.has(token)) {
      return response(401, { detail: "unknown participant token" });
    }
    if (this.completed.get(token)?.has(itemId)) {
      return response(409, { detail: "item already rated by this participant" });
    }
    if (this.assignments.get(token) !== itemId) {
      return response(400, { detail: "item is not assigned to this participant" });
    }
    const item = this.items.find((i) => i.item_id === itemId)!;
    const expected = new Set(Object.keys(item.comments));
    const seen = new Set<string>();
    for (const entry of ratings) {
      if (!expected.has(entry.key) || seen.has(entry.key)) {
        return response(400, { detail: `bad rating key: ${entry.key}` });
      }
      seen.add(entry.key);
      for (const metric of METRICS) {
        const value = entry[metric];
        if (
          typeof value !== "number" ||
          !Number.isInteger(value) ||
          value < SCORE_MIN ||
          value > SCORE_MAX
        ) {
          return response(400, { detail: `bad ${metric} score for ${entry.key}` });
        }
      }
    }
    if (seen.size !== expected.size) {
      return response(400, { detail: "ratings must cover every output" });
    }
    for (const entry of ratings) {
      this.ratings.push({
        model: item.key_map[entry.key]!,
        relevance: entry.relevance,
        information: entry.information,
        clarity: entry.clarity,
      });
    }
    this.assignments.delete(token);
    let done = this.completed.get(token);
    if (done === undefined) {
      done = new Set();
      this.completed.set(token, done);
    }
    done.add(itemId);
    return response(200, { status: "ok" });
  }

  private report(adminToken: string): ReturnType<FetchLike> {
    if (adminToken !== this.adminToken) {
      return response(401, { detail: "bad admin token" });
    }
    const byModel = new Map<string, StoredRating[]>();
    for (const rating of this.ratings) {
      const rows = byModel.get(rating.model) ?? [];
      rows.push(rating);
      byModel.set(rating.model, rows);
    }
    const mean = (xs: number[]) =>
      xs.reduce((a, b) => a + b, 0) / xs.length;
    const models = [...byModel.entries()]
      .sort(([a], [b]) => (a < b ? -1 : 1))
      .map(([model, rows]) => ({
        model,
        relevance: mean(rows.map((r) => r.relevance)),
        information: mean(rows.map((r) => r.information)),
        clarity: mean(rows.map((r) => r.clarity)),
        count: rows.length,
      }));
    return response(200, { models, rating_count: this.ratings.length });
  }
}

export function makeItems(n: number, modelNames: string[]): FakeItem[] {
  const items: FakeItem[] = [];
  for (let i = 0; i < n; i++) {
    const key_map: Record<string, string> = {};
    const comments: Record<string, string> = {};
    modelNames.forEach((model, j) => {
      const key = String.fromCharCode(65 + j); // A, B, C, ...
      key_map[key] = model;
      comments[key] = `comment ${key.toLowerCase()} for item ${i}`;
    });
    items.push({
      item_id: `item-${i}`,
      diff_lines: [
        { tag: "context", text: "def f(x):" },
        { tag: "deleted", text: "    return x" },
        { tag: "added", text: "    return x + 1" },
      ],
      region: `def f(x):\n    return x  # item ${i}`,
      summary: `function f returns its argument (item ${i})`,
      ground_truth: `should this be x + 1? (item ${i})`,
      key_map,
      comments,
    });
  }
  return items;
}
