import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { BindingSession, SchemaError } from "../src/index.js";
import type { RewardBreakdown, SampleRecord } from "../src/index.js";
import { FIXTURE_DIR, readJsonl, runCli, withTempDir, writeJsonl } from "./helpers.js";

interface GenerationRecord {
  sample_id: string;
  rollout_id: string;
  raw: string;
  model_tag?: string;
}

const REWARD_FIELDS = [
  "r_acc",
  "r_fmt",
  "r_recall",
  "r_precision",
  "r_swiou",
  "r_mhr",
  "r_len",
  "r_total",
  "best_heuristic",
  "per_gt_best_iou",
  "flags",
] as const;

function rewardView(b: RewardBreakdown) {
  return Object.fromEntries(REWARD_FIELDS.map((f) => [f, b[f]]));
}

const samples = readJsonl<SampleRecord>(join(FIXTURE_DIR, "golden_samples.jsonl"));
const generations = readJsonl<GenerationRecord>(
  join(FIXTURE_DIR, "golden_generations.jsonl"),
);
const config = JSON.parse(
  readFileSync(join(FIXTURE_DIR, "golden_config.json"), "utf-8"),
);

describe("totalReward parity with the CLI", () => {
  it("matches the CLI bit-for-bit on every fixture sample", () => {
    // Cover all 50 samples: the 48 fixture generations plus empty-string
    // rollouts for the two samples the fixture deliberately leaves without one.
    const bySample = new Map(generations.map((g) => [g.sample_id, g.raw]));
    const covered: Array<{ sample: SampleRecord; raw: string }> = samples.map(
      (sample) => ({
        sample,
        raw: bySample.get(sample.sample_id) ?? "",
      }),
    );
    expect(covered).toHaveLength(50);

    const cliRecords = withTempDir((dir) => {
      writeJsonl(
        dir,
        "gens.jsonl",
        covered.map(({ sample, raw }, i) => ({
          sample_id: sample.sample_id,
          rollout_id: `b${i}`,
          raw,
        })),
      );
      const out = join(dir, "out.jsonl");
      runCli([
        "score",
        "--samples", join(FIXTURE_DIR, "golden_samples.jsonl"),
        "--generations", join(dir, "gens.jsonl"),
        "--config", join(FIXTURE_DIR, "golden_config.json"),
        "--out", out,
      ]);
      return readJsonl<RewardBreakdown>(out);
    });
    const cliBySample = new Map(cliRecords.map((r) => [r.sample_id, r]));

    const session = new BindingSession({ config });
    const breakdowns = session.totalRewardBatch(
      covered.map(({ sample, raw }) => ({ generation: raw, sample })),
    );

    expect(breakdowns).toHaveLength(50);
    for (let i = 0; i < covered.length; i++) {
      const viaCli = cliBySample.get(covered[i]!.sample.sample_id)!;
      // toStrictEqual compares numbers with Object.is: bit-identical or bust.
      expect(rewardView(breakdowns[i]!)).toStrictEqual(rewardView(viaCli));
    }
    console.log("[ACCEPTANCE] criterion 11 binding reward parity: PASS");
  });

  it("returns a breakdown, not an exception, for malformed generations", () => {
    const session = new BindingSession();
    const breakdown = session.totalReward("<think>unclosed", {
      sample_id: "m1",
      question: "q",
      gold_answer: "EXIT",
      category: "OCR",
      gts: [{ box: [0, 0, 10, 10] }],
    });
    expect(breakdown.r_fmt).toBe(0);
    expect(breakdown.flags).toContain("parse_failure");
    expect(breakdown.r_swiou).toBe(0.5);
  });

  it("names the missing field in schema errors", () => {
    const session = new BindingSession();
    const bad = {
      sample_id: "x",
      question: "q",
      category: "OCR",
    } as unknown as SampleRecord;
    try {
      session.totalReward("<think>t</think><answer>A</answer>", bad);
      expect.unreachable("schema error expected");
    } catch (error) {
      expect(error).toBeInstanceOf(SchemaError);
      expect((error as SchemaError).field).toBe("gold_answer");
      expect((error as SchemaError).message).toContain("gold_answer");
    }
  });

  it("refs passed separately override the record's refs", () => {
    const session = new BindingSession();
    const sample: SampleRecord = {
      sample_id: "r1",
      question: "q",
      gold_answer: "EXIT",
      category: "OCR",
      refs: [],
    };
    const raw = "<think>the sign reads exit</think><answer>EXIT</answer>";
    const withoutRefs = session.totalReward(raw, sample);
    expect(withoutRefs.r_mhr).toBe(0);
    const withRefs = session.totalReward(raw, sample, [
      { heuristic: "context_aware", trajectory: raw },
    ]);
    expect(withRefs.r_mhr).toBe(1);
    expect(withRefs.best_heuristic).toBe("context_aware");
  });

  it("rejects a batch reusing a sample_id with different content", () => {
    const session = new BindingSession();
    const base: SampleRecord = {
      sample_id: "dup",
      question: "q",
      gold_answer: "A",
      category: "C",
    };
    expect(() =>
      session.totalRewardBatch([
        { generation: "x", sample: base },
        { generation: "y", sample: { ...base, gold_answer: "B" } },
      ]),
    ).toThrow(SchemaError);
  });
});
