"""Reward components and their composition into a per-generation breakdown.

The total reward is the weighted sum of four signals — answer accuracy,
format compliance, the salience-weighted dual IoU, and the best-of-three
heuristic similarity — plus a soft length penalty. Weights default to 1 so
the unweighted composite is the plain sum of the four signals.

Conventions the formulas leave open:

* precision over an empty prediction set is 1 (no extraneous boxes; the cost
  of finding nothing lives entirely in recall),
* a sample with no ground-truth annotations reports recall = precision = 1
  and carries a ``no_grounding_annotations`` flag so trainers can mask the
  term,
* a failed parse zeroes the format reward but every other term is still
  computed from an empty trajectory, keeping rollouts comparable within a
  group.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import DegenerateGroundTruth, JudgeUnavailable
from .geometry import BoundingBox, iou
from .similarity import ScorerMode, SimilarityScorer, multi_heuristic_reward_detailed
from .trajectory import (
    HeuristicTag,
    ParseReport,
    Trajectory,
    count_tokens,
    empty_trajectory,
    extract_boxes,
    parse_trajectory,
)

if TYPE_CHECKING:
    from .records import EvalSample

# Salience assigned to mission-critical objects when a dataset marks
# criticality as a boolean instead of a scalar.
DEFAULT_CRITICAL_SALIENCE = 2.0


@dataclass(frozen=True)
class GroundTruthObject:
    """A ground-truth box with its salience weight; salience > 1 marks
    mission-critical objects, exactly 1 marks non-essential ones."""

    box: BoundingBox
    salience: float = 1.0
    label: str = ""

    def __post_init__(self):
        s = self.salience
        if isinstance(s, bool) or not isinstance(s, (int, float)):
            raise ValueError(f"salience is not a number: {s!r}")
        if not math.isfinite(float(s)) or s < 1.0:
            raise ValueError(f"salience >= 1 violated: {s!r}")
        object.__setattr__(self, "salience", float(s))


class AnswerMatching(enum.Enum):
    EXACT_NORMALIZED = "exact_normalized"
    MULTIPLE_CHOICE_LETTER = "multiple_choice_letter"
    REMOTE_JUDGE = "remote_judge"


@dataclass(frozen=True)
class RewardConfig:
    """Weights, length budget, and answer-matching mode for total_reward."""

    w_acc: float = 1.0
    w_fmt: float = 1.0
    w_swiou: float = 1.0
    w_mhr: float = 1.0
    length_limit: int = 1024
    length_penalty_scale: float = 0.5
    answer_matching: AnswerMatching = AnswerMatching.EXACT_NORMALIZED

    def __post_init__(self):
        for name in ("w_acc", "w_fmt", "w_swiou", "w_mhr", "length_penalty_scale"):
            v = getattr(self, name)
            if not math.isfinite(float(v)) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")
        if self.length_limit < 1:
            raise ValueError(f"length_limit must be >= 1, got {self.length_limit}")

    @classmethod
    def from_dict(cls, data: dict) -> "RewardConfig":
        known = {"weights", "length_limit", "length_penalty_scale", "answer_matching"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        weights = data.get("weights", {})
        if not isinstance(weights, dict):
            raise ValueError("weights must be a mapping")
        for key in ("w_acc", "w_fmt", "w_swiou", "w_mhr"):
            if key in weights:
                kwargs[key] = weights[key]
        extra = set(weights) - {"w_acc", "w_fmt", "w_swiou", "w_mhr"}
        if extra:
            raise ValueError(f"unknown weight keys: {sorted(extra)}")
        if "length_limit" in data:
            kwargs["length_limit"] = int(data["length_limit"])
        if "length_penalty_scale" in data:
            kwargs["length_penalty_scale"] = float(data["length_penalty_scale"])
        if "answer_matching" in data:
            kwargs["answer_matching"] = AnswerMatching(data["answer_matching"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RewardConfig":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return {
            "weights": {
                "w_acc": self.w_acc,
                "w_fmt": self.w_fmt,
                "w_swiou": self.w_swiou,
                "w_mhr": self.w_mhr,
            },
            "length_limit": self.length_limit,
            "length_penalty_scale": self.length_penalty_scale,
            "answer_matching": self.answer_matching.value,
        }


@dataclass(frozen=True)
class SwIouResult:
    recall: float
    precision: float
    combined: float
    # one entry per ground truth: (gt index, best IoU, matching pred index or
    # None when no prediction overlaps it)
    per_gt_best_iou: tuple[tuple[int, float, int | None], ...]


@dataclass(frozen=True)
class RewardBreakdown:
    """Every scalar component for one generation, plus diagnostics."""

    r_acc: float
    r_fmt: float
    r_recall: float
    r_precision: float
    r_swiou: float
    r_mhr: float
    r_len: float
    r_total: float
    best_heuristic: HeuristicTag | None = None
    per_gt_best_iou: tuple[tuple[int, float, int | None], ...] = ()
    flags: tuple[str, ...] = ()


def salience_weighted_recall(
    preds: list[BoundingBox], gts: list[GroundTruthObject]
) -> float:
    """Salience-weighted mean of each ground truth's best IoU over the
    predictions: (1/Σ s_k) Σ_k s_k · max_i IoU(p_i, g_k)."""
    if not gts:
        raise DegenerateGroundTruth("recall needs at least one ground-truth object")
    total_weight = sum(g.salience for g in gts)
    weighted = 0.0
    for g in gts:
        best = max((iou(p, g.box) for p in preds), default=0.0)
        weighted += g.salience * best
    return weighted / total_weight


def unweighted_precision(
    preds: list[BoundingBox], gts: list[GroundTruthObject]
) -> float:
    """Mean of each prediction's best IoU over the ground truths: (1/N) Σ_i
    max_k IoU(p_i, g_k). Empty predictions score 1: nothing extraneous."""
    if not gts:
        raise DegenerateGroundTruth("precision needs at least one ground-truth object")
    if not preds:
        return 1.0
    return sum(max(iou(p, g.box) for g in gts) for p in preds) / len(preds)


def salience_weighted_iou(
    preds: list[BoundingBox], gts: list[GroundTruthObject]
) -> SwIouResult:
    """Recall, precision, and their mean, with per-ground-truth diagnostics."""
    recall = salience_weighted_recall(preds, gts)
    precision = unweighted_precision(preds, gts)
    diagnostics = []
    for k, g in enumerate(gts):
        best_iou = 0.0
        best_idx: int | None = None
        for i, p in enumerate(preds):
            v = iou(p, g.box)
            if v > best_iou:
                best_iou = v
                best_idx = i
        diagnostics.append((k, best_iou, best_idx))
    return SwIouResult(
        recall=recall,
        precision=precision,
        combined=(recall + precision) / 2.0,
        per_gt_best_iou=tuple(diagnostics),
    )


def format_reward(parse_result: Trajectory | ParseReport) -> int:
    """1 iff the trace parsed, the answer is non-empty, and every cited box
    is valid; 0 otherwise."""
    if isinstance(parse_result, ParseReport):
        return 0
    if not parse_result.answer.strip():
        return 0
    for step in parse_result.steps:
        if step.kind.value == "box_citation" and step.box is None:
            return 0
    return 1


_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)
# A standalone option letter: wrapped like (B) / [B], or an uppercase letter
# followed by punctuation or the end of the answer. Plain mid-sentence "A"
# and "I" are English words, not options.
_CHOICE_RE = re.compile(
    r"[\(\[]([A-Za-z])[\)\]]"
    r"|(?<![A-Za-z0-9])([A-Z])(?=\s*(?:[.,:;!?\)\]]|$))"
)


def normalize_answer(text: str) -> str:
    """Case-fold, strip punctuation, collapse whitespace."""
    return " ".join(_PUNCT_RE.sub(" ", text.casefold()).split())


def extract_choice_letter(text: str) -> str | None:
    """First standalone option letter; falls back to a bare one-letter answer."""
    m = _CHOICE_RE.search(text)
    if m:
        return (m.group(1) or m.group(2)).upper()
    stripped = normalize_answer(text)
    if len(stripped) == 1 and stripped.isalpha():
        return stripped.upper()
    return None


def accuracy_reward(
    answer: str,
    gold: str,
    mode: AnswerMatching = AnswerMatching.EXACT_NORMALIZED,
    judge=None,
) -> int:
    """Binary answer correctness under the configured matching mode."""
    if mode is AnswerMatching.EXACT_NORMALIZED:
        return int(normalize_answer(answer) == normalize_answer(gold))
    if mode is AnswerMatching.MULTIPLE_CHOICE_LETTER:
        got = extract_choice_letter(answer)
        want = extract_choice_letter(gold)
        return int(got is not None and want is not None and got == want)
    if judge is None:
        raise JudgeUnavailable("remote-judge answer matching needs a judge client")
    return int(judge.score(answer, gold, "accuracy") >= 0.5)


def _accuracy_with_scorer(
    answer: str, gold: str, cfg: RewardConfig, scorer: SimilarityScorer
) -> tuple[int, bool]:
    """Accuracy plus a fallback flag; remote-judge failures degrade to exact
    matching when the scorer allows fallback."""
    if cfg.answer_matching is not AnswerMatching.REMOTE_JUDGE:
        return accuracy_reward(answer, gold, cfg.answer_matching), False
    try:
        return (
            accuracy_reward(answer, gold, cfg.answer_matching, judge=scorer.client()),
            False,
        )
    except JudgeUnavailable:
        if scorer.mode is not ScorerMode.JUDGE_WITH_FALLBACK:
            raise
        scorer._record_fallback()
        return accuracy_reward(answer, gold, AnswerMatching.EXACT_NORMALIZED), True


def length_penalty(token_count: int, cfg: RewardConfig) -> float:
    """0 at or under the limit, then a linear ramp down to the -scale floor."""
    if token_count <= cfg.length_limit:
        return 0.0
    scale = cfg.length_penalty_scale
    excess_ratio = (token_count - cfg.length_limit) / cfg.length_limit
    return -min(scale, scale * excess_ratio)


def _all_normalized(boxes: list[BoundingBox]) -> bool:
    return all(
        0.0 <= c <= 1.0 for b in boxes for c in (b.x1, b.y1, b.x2, b.y2)
    )


def scaled_predictions(
    traj: Trajectory, image_size: tuple[int, int] | None
) -> tuple[list[BoundingBox], bool]:
    """Cited boxes, rescaled to pixels when every coordinate sits in [0, 1]
    and the image size is known. Returns (boxes, scaled_flag)."""
    preds = extract_boxes(traj)
    if preds and image_size is not None and _all_normalized(preds):
        w, h = image_size
        return [b.scaled(w, h) for b in preds], True
    return preds, False


def total_reward(
    generation: str,
    sample: "EvalSample",
    refs: list[tuple[HeuristicTag, Trajectory]],
    cfg: RewardConfig,
    scorer: SimilarityScorer,
) -> RewardBreakdown:
    """Score one raw generation against its sample: parse, compute every
    component, and compose the weighted total. Never raises on malformed
    generations; only remote-judge failures without fallback propagate."""
    flags: list[str] = []

    parsed = parse_trajectory(generation)
    if isinstance(parsed, ParseReport):
        flags.append("parse_failure")
        traj = empty_trajectory(generation)
    else:
        traj = parsed
    r_fmt = format_reward(parsed)

    preds, scaled = scaled_predictions(traj, sample.image_size)
    if scaled:
        flags.append("normalized_preds_scaled")

    gts = list(sample.gts)
    if gts:
        sw = salience_weighted_iou(preds, gts)
        r_recall, r_precision, r_swiou = sw.recall, sw.precision, sw.combined
        per_gt = sw.per_gt_best_iou
    else:
        flags.append("no_grounding_annotations")
        r_recall = r_precision = r_swiou = 1.0
        per_gt = ()

    r_acc, acc_fallback = _accuracy_with_scorer(
        traj.answer, sample.gold_answer, cfg, scorer
    )

    if refs:
        r_mhr, best_tag, mhr_fallback = multi_heuristic_reward_detailed(
            traj, refs, scorer
        )
    else:
        r_mhr, best_tag, mhr_fallback = 0.0, None, False
    if (acc_fallback or mhr_fallback) and "judge_fallback" not in flags:
        flags.append("judge_fallback")

    r_len = length_penalty(count_tokens(generation), cfg)
    r_total = (
        cfg.w_acc * r_acc
        + cfg.w_fmt * r_fmt
        + cfg.w_swiou * r_swiou
        + cfg.w_mhr * r_mhr
        + r_len
    )
    return RewardBreakdown(
        r_acc=float(r_acc),
        r_fmt=float(r_fmt),
        r_recall=r_recall,
        r_precision=r_precision,
        r_swiou=r_swiou,
        r_mhr=r_mhr,
        r_len=r_len,
        r_total=r_total,
        best_heuristic=best_tag,
        per_gt_best_iou=per_gt,
        flags=tuple(flags),
    )
