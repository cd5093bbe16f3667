/** Shared wire types, validated against contracts/study_api.json. */

import { z } from "zod";

export const SCORE_MIN = 0;
export const SCORE_MAX = 5;

export const METRICS = ["relevance", "information", "clarity"] as const;
export type Metric = (typeof METRICS)[number];

export const DiffLineSchema = z.object({
  tag: z.enum(["context", "deleted", "added"]),
  text: z.string(),
});
export type DiffLine = z.infer<typeof DiffLineSchema>;

export const AnonymousOutputSchema = z.object({
  key: z.string(),
  comment: z.string(),
});
export type AnonymousOutput = z.infer<typeof AnonymousOutputSchema>;

export const StudyItemSchema = z.object({
  item_id: z.string(),
  diff_lines: z.array(DiffLineSchema),
  region: z.string(),
  summary: z.string(),
  ground_truth: z.string(),
  outputs: z.array(AnonymousOutputSchema),
});
export type StudyItem = z.infer<typeof StudyItemSchema>;

export const InstructionsResponseSchema = z.object({
  instructions: z.string(),
});
export type InstructionsResponse = z.infer<typeof InstructionsResponseSchema>;

export const StatusResponseSchema = z.object({
  status: z.string(),
});
export type StatusResponse = z.infer<typeof StatusResponseSchema>;

export const NextItemResponseSchema = z.object({
  done: z.boolean(),
  item: StudyItemSchema.nullable(),
});
export type NextItemResponse = z.infer<typeof NextItemResponseSchema>;

export const RatingEntrySchema = z.object({
  key: z.string(),
  relevance: z.number().int().min(SCORE_MIN).max(SCORE_MAX),
  information: z.number().int().min(SCORE_MIN).max(SCORE_MAX),
  clarity: z.number().int().min(SCORE_MIN).max(SCORE_MAX),
});
export type RatingEntry = z.infer<typeof RatingEntrySchema>;

export const ModelReportSchema = z.object({
  model: z.string(),
  relevance: z.number(),
  information: z.number(),
  clarity: z.number(),
  count: z.number().int(),
});

export const ReportResponseSchema = z.object({
  models: z.array(ModelReportSchema),
  rating_count: z.number().int(),
});
export type ReportResponse = z.infer<typeof ReportResponseSchema>;
