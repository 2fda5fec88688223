export { BindingSession } from "./session.js";
export type { RewardRequest, ScorerMode, SessionOptions } from "./session.js";
export type {
  GroundTruthRecord,
  ReferenceRecord,
  RewardBreakdown,
  RewardConfig,
  RewardWeights,
  SampleRecord,
} from "./records.js";
export {
  EngineError,
  EngineIoError,
  EngineUnavailableError,
  JudgeError,
  SchemaError,
  ValidationError,
} from "./errors.js";
