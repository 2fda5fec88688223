import { describe, expect, it } from "vitest";

import { BindingSession, EngineUnavailableError } from "../src/index.js";
import type { SampleRecord } from "../src/index.js";

const SAMPLE: SampleRecord = {
  sample_id: "s1",
  question: "q",
  gold_answer: "EXIT",
  category: "OCR",
  gts: [{ box: [0, 0, 10, 10], salience: 2 }],
};

const GOOD = "<think><box>[0,0,10,10]</box> sign</think><answer>EXIT</answer>";
const LONG =
  "<think>" + "word ".repeat(60) + "</think><answer>EXIT</answer>";

describe("BindingSession", () => {
  it("keeps sessions with different configs independent when interleaved", () => {
    const lenient = new BindingSession({
      config: { length_limit: 1024, length_penalty_scale: 0.5 },
    });
    const strictLength = new BindingSession({
      config: { length_limit: 10, length_penalty_scale: 0.5 },
    });

    const a1 = lenient.totalReward(LONG, SAMPLE);
    const b1 = strictLength.totalReward(LONG, SAMPLE);
    const a2 = lenient.totalReward(LONG, SAMPLE);
    const b2 = strictLength.totalReward(LONG, SAMPLE);

    expect(a1.r_len).toBe(0);
    expect(b1.r_len).toBe(-0.5);
    expect(a2).toStrictEqual(a1);
    expect(b2).toStrictEqual(b1);
  });

  it("config objects are copied, not shared", () => {
    const config = { length_limit: 10, length_penalty_scale: 0.5 };
    const session = new BindingSession({ config });
    config.length_limit = 100000; // mutation after construction must not leak
    expect(session.totalReward(LONG, SAMPLE).r_len).toBe(-0.5);
  });

  it("weight configuration flows through to the total", () => {
    const session = new BindingSession({
      config: { weights: { w_acc: 0, w_fmt: 0, w_swiou: 0, w_mhr: 0 } },
    });
    expect(session.totalReward(GOOD, SAMPLE).r_total).toBe(0);
  });

  it("judge scorer without endpoint is rejected at construction", () => {
    expect(() => new BindingSession({ scorer: "judge" })).toThrow(
      /judgeEndpoint/,
    );
  });

  it("reports a helpful error when the engine is missing", () => {
    const session = new BindingSession({ engineCommand: ["definitely-not-a-binary"] });
    expect(() => session.totalReward(GOOD, SAMPLE)).toThrow(
      EngineUnavailableError,
    );
  });

  it("empty batches short-circuit without spawning", () => {
    const session = new BindingSession({ engineCommand: ["definitely-not-a-binary"] });
    expect(session.totalRewardBatch([])).toStrictEqual([]);
    expect(session.groupAdvantagesBatch([])).toStrictEqual([]);
  });
});
