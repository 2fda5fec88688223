import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export const FIXTURE_DIR = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "..",
  "tests",
  "fixtures",
);

export function readJsonl<T>(path: string): T[] {
  return readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}

/** Run the engine CLI directly (the reference side of parity checks). */
export function runCli(args: string[]): void {
  const result = spawnSync("groundscore", args, { encoding: "utf-8" });
  if (result.error) throw result.error;
  if (result.status !== 0) {
    throw new Error(`cli exited ${result.status}: ${result.stderr}`);
  }
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "bindings-test-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function writeJsonl(dir: string, name: string, records: object[]): string {
  const path = join(dir, name);
  writeFileSync(
    path,
    records.map((r) => JSON.stringify(r)).join("\n") + "\n",
    "utf-8",
  );
  return path;
}

/** Deterministic PRNG for reproducible random groups. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Two-pass mean/population-std oracle, mirroring the engine's definition. */
export function twoPassAdvantages(rewards: number[], eps: number): number[] {
  const n = rewards.length;
  const mean = rewards.reduce((a, b) => a + b, 0) / n;
  const variance = rewards.reduce((a, r) => a + (r - mean) ** 2, 0) / n;
  const std = Math.sqrt(variance);
  if (std === 0) return rewards.map(() => 0);
  return rewards.map((r) => (r - mean) / (std + eps));
}
