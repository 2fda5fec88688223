/**
 * Subprocess plumbing: one engine invocation per batch, over temp record
 * files. The binding never reimplements a formula — every number comes out
 * of the same engine the CLI runs.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { EngineUnavailableError, errorForExitCode } from "./errors.js";

const CANDIDATE_COMMANDS: string[][] = [
  ["groundscore"],
  ["python3", "-m", "groundscore.cli"],
];

export interface EngineInvocation {
  stdout: string;
  stderr: string;
}

export class EngineProcess {
  private command: string[] | null;

  constructor(command?: string[]) {
    this.command = command ?? null;
  }

  private resolveCommand(): string[] {
    if (this.command) return this.command;
    for (const candidate of CANDIDATE_COMMANDS) {
      const probe = spawnSync(candidate[0]!, [...candidate.slice(1), "--help"], {
        encoding: "utf-8",
      });
      if (!probe.error && probe.status === 0) {
        this.command = candidate;
        return candidate;
      }
    }
    throw new EngineUnavailableError(
      "groundscore engine not found; install it (pip install groundscore) or pass engineCommand",
    );
  }

  run(args: string[]): EngineInvocation {
    const command = this.resolveCommand();
    const result = spawnSync(command[0]!, [...command.slice(1), ...args], {
      encoding: "utf-8",
      maxBuffer: 256 * 1024 * 1024,
    });
    if (result.error) {
      throw new EngineUnavailableError(`failed to spawn engine: ${result.error.message}`);
    }
    if (result.status !== 0) {
      throw errorForExitCode(result.status ?? -1, result.stderr.trim());
    }
    return { stdout: result.stdout, stderr: result.stderr };
  }
}

/** Scratch directory for one batch of record files. */
export function withBatchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "groundscore-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function writeBatchFile(dir: string, name: string, content: string): string {
  const path = join(dir, name);
  writeFileSync(path, content, "utf-8");
  return path;
}

export function readBatchFile(path: string): string {
  return readFileSync(path, "utf-8");
}
