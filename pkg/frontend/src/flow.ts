/** Participant session state machine.
 *
 * Phases: instructions -> rating -> ... -> done.  A returning
 * participant who already acknowledged the instructions is routed
 * straight to their next item.  Entered scores are persisted as drafts
 * through an injected storage so a page reload never loses work, and
 * server errors are surfaced without discarding the current sheet.
 */

import { ApiError, StudyApiClient } from "./api.js";
import { DraftScores, ScoreSheet } from "./scores.js";
import { Metric, StudyItem } from "./types.js";

/** Minimal persistence interface; window.localStorage satisfies it. */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements StorageLike {
  private readonly data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export type Phase = "loading" | "instructions" | "rating" | "done";

export class StudyFlow {
  phase: Phase = "loading";
  instructionsText = "";
  item: StudyItem | null = null;
  sheet: ScoreSheet | null = null;
  /** Last server/network error, surfaced inline next to a retry control. */
  error: string | null = null;

  constructor(
    private readonly api: StudyApiClient,
    private readonly token: string,
    private readonly storage: StorageLike,
  ) {}

  private draftKey(itemId: string): string {
    return `reviewgen-draft:${this.token}:${itemId}`;
  }

  /** Entry point: route returning participants past the instructions. */
  async start(): Promise<void> {
    this.error = null;
    try {
      await this.loadNextItem();
    } catch (err) {
      if (err instanceof ApiError && (err.status === 403 || err.status === 401)) {
        // Not acknowledged yet (or a fresh token): show the instructions.
        this.instructionsText = await this.api.instructions();
        this.phase = "instructions";
        return;
      }
      this.fail(err);
    }
  }

  /** Acknowledge the instructions, then fetch the first item. */
  async acknowledge(): Promise<void> {
    this.error = null;
    try {
      await this.api.acknowledge(this.token);
      await this.loadNextItem();
    } catch (err) {
      this.fail(err);
    }
  }

  private async loadNextItem(): Promise<void> {
    const resp = await this.api.nextItem(this.token);
    if (resp.done || resp.item === null) {
      this.phase = "done";
      this.item = null;
      this.sheet = null;
      return;
    }
    this.item = resp.item;
    this.sheet = new ScoreSheet(resp.item.outputs.map((o) => o.key));
    this.restoreDraft();
    this.phase = "rating";
  }

  setScore(key: string, metric: Metric, value: number): void {
    if (this.sheet === null || this.item === null) {
      throw new Error("no item is being rated");
    }
    this.sheet.setScore(key, metric, value);
    this.saveDraft();
  }

  get canSubmit(): boolean {
    return this.phase === "rating" && this.sheet !== null && this.sheet.isComplete();
  }

  /** Submit the completed sheet; on failure the scores stay intact. */
  async submit(): Promise<void> {
    if (this.item === null || this.sheet === null) {
      throw new Error("no item is being rated");
    }
    if (!this.canSubmit) {
      throw new Error("cannot submit an incomplete sheet");
    }
    const itemId = this.item.item_id;
    this.error = null;
    try {
      await this.api.submitRatings(this.token, itemId, this.sheet.toRatings());
    } catch (err) {
      this.fail(err);
      return;
    }
    this.storage.removeItem(this.draftKey(itemId));
    try {
      await this.loadNextItem();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Re-run whatever last failed (used by the inline retry control). */
  async retry(): Promise<void> {
    if (this.phase === "rating" && this.sheet !== null && this.canSubmit) {
      await this.submit();
    } else if (this.phase === "instructions") {
      await this.acknowledge();
    } else {
      await this.start();
    }
  }

  private saveDraft(): void {
    if (this.item === null || this.sheet === null) {
      return;
    }
    this.storage.setItem(
      this.draftKey(this.item.item_id),
      JSON.stringify(this.sheet.toDraft()),
    );
  }

  private restoreDraft(): void {
    if (this.item === null || this.sheet === null) {
      return;
    }
    const raw = this.storage.getItem(this.draftKey(this.item.item_id));
    if (raw === null) {
      return;
    }
    try {
      this.sheet.loadDraft(JSON.parse(raw) as DraftScores);
    } catch {
      // A corrupt draft is discarded rather than blocking the session.
      this.storage.removeItem(this.draftKey(this.item.item_id));
    }
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.error = `server error (${err.status}): ${err.message}`;
    } else {
      this.error = err instanceof Error ? err.message : String(err);
    }
  }
}
