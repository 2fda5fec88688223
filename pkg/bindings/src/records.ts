/**
 * Plain-object views of the engine's record-file formats. Everything that
 * crosses the boundary is scalars, strings, arrays, and maps — no handles.
 */

import { SchemaError } from "./errors.js";

export interface GroundTruthRecord {
  box: [number, number, number, number];
  salience?: number;
  critical?: boolean;
  label?: string;
}

export interface ReferenceRecord {
  heuristic: "evidence_driven" | "context_aware" | "deductive_verification";
  trajectory: string;
}

export interface SampleRecord {
  sample_id: string;
  question: string;
  gold_answer: string;
  category: string;
  gts?: GroundTruthRecord[];
  image_size?: [number, number];
  refs?: ReferenceRecord[];
}

/** Every scalar reward component for one generation, as the engine emits it. */
export interface RewardBreakdown {
  sample_id: string;
  rollout_id: string;
  r_acc: number;
  r_fmt: number;
  r_recall: number;
  r_precision: number;
  r_swiou: number;
  r_mhr: number;
  r_len: number;
  r_total: number;
  best_heuristic: string | null;
  per_gt_best_iou: Array<[number, number, number | null]>;
  flags: string[];
}

export interface RewardWeights {
  w_acc?: number;
  w_fmt?: number;
  w_swiou?: number;
  w_mhr?: number;
}

export interface RewardConfig {
  weights?: RewardWeights;
  length_limit?: number;
  length_penalty_scale?: number;
  answer_matching?:
    | "exact_normalized"
    | "multiple_choice_letter"
    | "remote_judge";
}

const SAMPLE_REQUIRED: Array<[keyof SampleRecord, string]> = [
  ["sample_id", "string"],
  ["question", "string"],
  ["gold_answer", "string"],
  ["category", "string"],
];

/** Shallow schema check with field-naming errors; deep validation happens
 * engine-side under --strict. */
export function checkSampleRecord(record: SampleRecord): void {
  for (const [field, kind] of SAMPLE_REQUIRED) {
    const value = record[field];
    if (value === undefined || value === null) {
      throw new SchemaError(field, `sample record missing required field '${field}'`);
    }
    if (typeof value !== kind) {
      throw new SchemaError(field, `sample record field '${field}' must be a ${kind}`);
    }
  }
}

export function toJsonl(records: object[]): string {
  return records.map((r) => JSON.stringify(r)).join("\n") + (records.length ? "\n" : "");
}

export function fromJsonl<T>(text: string): T[] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}
