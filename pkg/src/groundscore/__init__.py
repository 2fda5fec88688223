"""Reward computation and evaluation for visually grounded reasoning traces.

The engine parses interleaved text + bounding-box reasoning traces, scores
them with a composite reward (salience-weighted dual IoU, best-of-three
heuristic similarity, accuracy, format compliance, soft length penalty),
standardizes rollout groups into advantages, and produces benchmark reports
with per-category accuracy, mIoU, and baseline deltas.
"""

from .errors import (
    DegenerateGroundTruth,
    DuplicateHeuristicTag,
    DuplicateSampleId,
    EngineError,
    InvalidBox,
    IoFailure,
    JudgeProtocolError,
    JudgeUnavailable,
    NonFiniteReward,
    ValidationFailure,
)
from .evaluation import (
    DeltaReport,
    EvaluationReport,
    ReportFlags,
    delta_report,
    evaluate,
    parse_delta_report,
    parse_report,
    render_report,
)
from .geometry import BoundingBox, area, iou
from .grpo import RolloutGroup, batch_advantages, group_advantages
from .judge import JudgeClient
from .records import (
    EvalSample,
    GenerationRecord,
    ValidationIssue,
    ValidationReport,
    join_generations,
    load_generations,
    load_groups,
    load_samples,
    write_generations,
    write_samples,
)
from .rewards import (
    AnswerMatching,
    GroundTruthObject,
    RewardBreakdown,
    RewardConfig,
    SwIouResult,
    accuracy_reward,
    format_reward,
    length_penalty,
    salience_weighted_iou,
    salience_weighted_recall,
    total_reward,
    unweighted_precision,
)
from .similarity import (
    ScorerMode,
    SimilarityScorer,
    multi_heuristic_reward,
    similarity,
)
from .trajectory import (
    HeuristicTag,
    ParseReport,
    ParseViolation,
    StepKind,
    Trajectory,
    TrajectoryStep,
    count_tokens,
    empty_trajectory,
    extract_boxes,
    parse_trajectory,
    serialize_trajectory,
)

__version__ = "0.1.0"
