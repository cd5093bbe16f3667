/** Typed client for the study service's HTTP API.
 *
 * The fetch implementation is injected so tests can run against an
 * in-memory fake server without touching the network.
 */

import {
  InstructionsResponseSchema,
  NextItemResponse,
  NextItemResponseSchema,
  RatingEntry,
  ReportResponse,
  ReportResponseSchema,
  StatusResponseSchema,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Route table mirroring contracts/study_api.json; tests assert the match. */
export const ROUTES = {
  instructions: { method: "GET", path: "/api/instructions" },
  acknowledge: { method: "POST", path: "/api/instructions/ack" },
  next_item: { method: "GET", path: "/api/next-item" },
  submit_ratings: { method: "POST", path: "/api/ratings" },
  report: { method: "GET", path: "/api/report" },
} as const;

/** Error carrying the HTTP status and the server's detail message. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function readDetail(resp: {
  json(): Promise<unknown>;
}): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: unknown };
    if (body && typeof body.detail === "string") {
      return body.detail;
    }
  } catch {
    // fall through to the generic message
  }
  return "request failed";
}

export class StudyApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request(
    route: { method: string; path: string },
    opts: { query?: Record<string, string>; body?: unknown } = {},
  ): Promise<unknown> {
    let url = this.baseUrl + route.path;
    if (opts.query) {
      url += "?" + new URLSearchParams(opts.query).toString();
    }
    const init: Parameters<FetchLike>[1] = { method: route.method };
    if (opts.body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(opts.body);
    }
    const resp = await this.fetchImpl(url, init);
    if (resp.status >= 400) {
      throw new ApiError(resp.status, await readDetail(resp));
    }
    return resp.json();
  }

  async instructions(): Promise<string> {
    const body = await this.request(ROUTES.instructions);
    return InstructionsResponseSchema.parse(body).instructions;
  }

  async acknowledge(token: string): Promise<void> {
    const body = await this.request(ROUTES.acknowledge, { body: { token } });
    StatusResponseSchema.parse(body);
  }

  async nextItem(token: string): Promise<NextItemResponse> {
    const body = await this.request(ROUTES.next_item, { query: { token } });
    return NextItemResponseSchema.parse(body);
  }

  async submitRatings(
    token: string,
    itemId: string,
    ratings: RatingEntry[],
  ): Promise<void> {
    const body = await this.request(ROUTES.submit_ratings, {
      body: { token, item_id: itemId, ratings },
    });
    StatusResponseSchema.parse(body);
  }

  async report(adminToken: string): Promise<ReportResponse> {
    const body = await this.request(ROUTES.report, {
      query: { admin_token: adminToken },
    });
    return ReportResponseSchema.parse(body);
  }
}
