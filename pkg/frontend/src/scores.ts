/** Score bookkeeping for a single study item.
 *
 * Submission is gated on completeness: every output needs an integer
 * score for every metric before the sheet can be turned into a rating
 * payload.
 */

import {
  METRICS,
  Metric,
  RatingEntry,
  SCORE_MAX,
  SCORE_MIN,
} from "./types.js";

export type DraftScores = Record<string, Partial<Record<Metric, number>>>;

export class ScoreSheet {
  private readonly scores = new Map<string, Map<Metric, number>>();

  constructor(private readonly keys: readonly string[]) {
    for (const key of keys) {
      this.scores.set(key, new Map());
    }
  }

  /** Total number of scores required before submission unlocks. */
  get requiredCount(): number {
    return this.keys.length * METRICS.length;
  }

  get filledCount(): number {
    let n = 0;
    for (const perKey of this.scores.values()) {
      n += perKey.size;
    }
    return n;
  }

  setScore(key: string, metric: Metric, value: number): void {
    const perKey = this.scores.get(key);
    if (perKey === undefined) {
      throw new Error(`unknown output key: ${key}`);
    }
    if (!Number.isInteger(value) || value < SCORE_MIN || value > SCORE_MAX) {
      throw new Error(
        `score must be an integer in [${SCORE_MIN}, ${SCORE_MAX}], got ${value}`,
      );
    }
    perKey.set(metric, value);
  }

  getScore(key: string, metric: Metric): number | undefined {
    return this.scores.get(key)?.get(metric);
  }

  isComplete(): boolean {
    return this.filledCount === this.requiredCount;
  }

  /** Build the ratings payload; only valid once the sheet is complete. */
  toRatings(): RatingEntry[] {
    if (!this.isComplete()) {
      throw new Error(
        `incomplete sheet: ${this.filledCount}/${this.requiredCount} scores set`,
      );
    }
    return this.keys.map((key) => {
      const perKey = this.scores.get(key)!;
      return {
        key,
        relevance: perKey.get("relevance")!,
        information: perKey.get("information")!,
        clarity: perKey.get("clarity")!,
      };
    });
  }

  /** Plain-object snapshot for draft persistence. */
  toDraft(): DraftScores {
    const draft: DraftScores = {};
    for (const [key, perKey] of this.scores) {
      if (perKey.size > 0) {
        draft[key] = Object.fromEntries(perKey) as Partial<
          Record<Metric, number>
        >;
      }
    }
    return draft;
  }

  /** Restore a draft, silently skipping entries that no longer apply. */
  loadDraft(draft: DraftScores): void {
    for (const [key, perKey] of Object.entries(draft)) {
      if (!this.scores.has(key)) {
        continue;
      }
      for (const metric of METRICS) {
        const value = perKey[metric];
        if (
          typeof value === "number" &&
          Number.isInteger(value) &&
          value >= SCORE_MIN &&
          value <= SCORE_MAX
        ) {
          this.setScore(key, metric, value);
        }
      }
    }
  }
}
