"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class InvalidBox(EngineError, ValueError):
    """Bounding box construction violated an invariant."""


class DegenerateGroundTruth(EngineError):
    """An operation that requires ground-truth objects received none."""


class DuplicateHeuristicTag(EngineError):
    """Two reference trajectories share the same heuristic tag."""


class NonFiniteReward(EngineError):
    """A rollout group contains NaN or infinite rewards."""


class DuplicateSampleId(EngineError):
    """Two rollout groups share a sample_id."""


class IoFailure(EngineError):
    """A record file could not be read or written."""


class ValidationFailure(EngineError):
    """Strict-mode loading encountered invalid records."""

    def __init__(self, message, issues=None):
        super().__init__(message)
        self.issues = list(issues) if issues else []


class JudgeUnavailable(EngineError):
    """The remote judge could not produce a score and no fallback is configured."""


class JudgeProtocolError(JudgeUnavailable):
    """The remote judge answered, but outside the wire protocol.

    Raised for non-2xx status, malformed bodies, and out-of-range scores.
    Subclasses JudgeUnavailable so callers without a fallback treat protocol
    violations the same as an unreachable judge.
    """
