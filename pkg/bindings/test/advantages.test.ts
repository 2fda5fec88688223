import { describe, expect, it } from "vitest";

import { BindingSession, SchemaError } from "../src/index.js";
import { mulberry32, twoPassAdvantages } from "./helpers.js";

const session = new BindingSession();

describe("groupAdvantages", () => {
  it("zeroes a constant group", () => {
    expect(session.groupAdvantages([1, 1, 1, 1])).toStrictEqual([0, 0, 0, 0]);
  });

  it("standardizes a two-point group", () => {
    const [low, high] = session.groupAdvantages([0, 2], 1e-12);
    expect(low).toBeCloseTo(-1, 9);
    expect(high).toBeCloseTo(1, 9);
  });

  it("rejects an empty group", () => {
    expect(() => session.groupAdvantages([])).toThrow(SchemaError);
  });

  it("rejects non-finite rewards", () => {
    expect(() => session.groupAdvantages([1, Number.NaN])).toThrow(SchemaError);
    expect(() => session.groupAdvantages([Infinity])).toThrow(SchemaError);
  });

  it("matches the two-pass oracle on 100 random groups within 1e-12", () => {
    const rand = mulberry32(20250809);
    const eps = 1e-8;
    const groups: number[][] = [];
    for (let g = 0; g < 100; g++) {
      const size = 1 + Math.floor(rand() * 16);
      groups.push(Array.from({ length: size }, () => rand() * 20 - 10));
    }
    const viaEngine = session.groupAdvantagesBatch(groups, eps);
    for (let g = 0; g < groups.length; g++) {
      const expected = twoPassAdvantages(groups[g]!, eps);
      const actual = viaEngine[g]!;
      expect(actual).toHaveLength(expected.length);
      for (let i = 0; i < expected.length; i++) {
        expect(Math.abs(actual[i]! - expected[i]!)).toBeLessThanOrEqual(1e-12);
      }
    }
    console.log("[ACCEPTANCE] criterion 11 binding advantage parity: PASS");
  });

  it("keeps rollout order within each group", () => {
    const [adv] = session.groupAdvantagesBatch([[5, 1, 3]]);
    expect(adv![0]).toBeGreaterThan(0);
    expect(adv![1]).toBeLessThan(0);
    expect(adv![2]).toBeCloseTo(0, 6);
  });
});
