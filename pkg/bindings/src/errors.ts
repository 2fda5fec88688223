/** Error kinds mirroring the engine's exit codes and exception families. */

export class EngineError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** The engine binary could not be found or spawned. */
export class EngineUnavailableError extends EngineError {}

/** Exit code 1: the engine reported an I/O failure. */
export class EngineIoError extends EngineError {}

/** Exit code 2: record or config validation failed engine-side. */
export class ValidationError extends EngineError {}

/** Exit code 3: remote judge failed and no fallback was configured. */
export class JudgeError extends EngineError {}

/** A record handed to the binding is missing or mistypes a required field. */
export class SchemaError extends EngineError {
  readonly field: string;

  constructor(field: string, message: string) {
    super(message);
    this.field = field;
  }
}

export function errorForExitCode(code: number, detail: string): EngineError {
  switch (code) {
    case 1:
      return new EngineIoError(detail);
    case 2:
      return new ValidationError(detail);
    case 3:
      return new JudgeError(detail);
    default:
      return new EngineError(`engine exited with code ${code}: ${detail}`);
  }
}
