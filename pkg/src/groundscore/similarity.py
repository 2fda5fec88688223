"""Trajectory similarity and the best-of-three heuristic reward.

The deterministic scorer is an offline, reproducible proxy for a judge model:
it blends a text term (global alignment over the textual steps, match score =
term-frequency cosine of normalized token multisets, gap penalty 0,
normalized by the longer sequence) with a spatial term (symmetrized mean
best-IoU between the two box lists). Only think-section steps participate;
answer correctness is the accuracy reward's job. When the reference cites no
boxes the spatial term is dropped and the text term gets full weight.

Remote modes delegate to :class:`groundscore.judge.JudgeClient`; the fallback
mode degrades to the deterministic scorer per call and counts each fallback.
"""

from __future__ import annotations

import enum
import math
import re
import threading
from collections import Counter

from .errors import DuplicateHeuristicTag, JudgeUnavailable
from .geometry import BoundingBox, iou
from .judge import JudgeClient
from .trajectory import (
    HeuristicTag,
    Trajectory,
    extract_boxes,
    serialize_trajectory,
)

_WORD_RE = re.compile(r"\w+")

# Function words carry no reasoning content; kept deliberately small.
STOP_WORDS = frozenset(
    """a an the is are was were be been being of to in on at for and or but
    with as by it its this that these those from""".split()
)


class ScorerMode(enum.Enum):
    DETERMINISTIC = "deterministic"
    REMOTE_JUDGE = "remote_judge"
    JUDGE_WITH_FALLBACK = "judge_with_fallback"


class SimilarityScorer:
    """Scoring configuration plus the lazily built judge client.

    Deterministic scoring is pure; remote modes keep at most ``max_inflight``
    requests outstanding and the fallback counter is thread safe.
    """

    def __init__(
        self,
        mode: ScorerMode = ScorerMode.DETERMINISTIC,
        text_weight: float = 0.5,
        judge_endpoint: str | None = None,
        timeout_ms: float = 10_000.0,
        max_inflight: int = 8,
    ):
        if not 0.0 <= text_weight <= 1.0:
            raise ValueError(f"text_weight must be in [0, 1], got {text_weight}")
        if timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if max_inflight < 1:
            raise ValueError("max_inflight must be >= 1")
        if mode is not ScorerMode.DETERMINISTIC and not judge_endpoint:
            raise ValueError(f"{mode.value} mode requires a judge endpoint")
        self.mode = mode
        self.text_weight = text_weight
        self.judge_endpoint = judge_endpoint
        self.timeout_ms = timeout_ms
        self.max_inflight = max_inflight
        self._client: JudgeClient | None = None
        self._lock = threading.Lock()
        self._fallback_count = 0

    @property
    def fallback_count(self) -> int:
        with self._lock:
            return self._fallback_count

    def _record_fallback(self) -> None:
        with self._lock:
            self._fallback_count += 1

    def client(self) -> JudgeClient:
        with self._lock:
            if self._client is None:
                self._client = JudgeClient(
                    self.judge_endpoint,
                    timeout_ms=self.timeout_ms,
                    max_inflight=self.max_inflight,
                )
            return self._client


def normalize_tokens(text: str) -> Counter:
    """Case-folded word tokens with stop words dropped, as a multiset."""
    return Counter(
        tok for tok in _WORD_RE.findall(text.casefold()) if tok not in STOP_WORDS
    )


def _tf_cosine(a: Counter, b: Counter) -> float:
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    dot = sum(count * b[tok] for tok, count in a.items() if tok in b)
    if dot == 0:
        return 0.0
    norm_a = math.sqrt(sum(c * c for c in a.values()))
    norm_b = math.sqrt(sum(c * c for c in b.values()))
    return min(1.0, dot / (norm_a * norm_b))


def _text_similarity(gen: Trajectory, ref: Trajectory) -> float:
    gen_tokens = [normalize_tokens(s.text) for s in gen.text_steps()]
    ref_tokens = [normalize_tokens(s.text) for s in ref.text_steps()]
    n, m = len(gen_tokens), len(ref_tokens)
    if n == 0 and m == 0:
        return 1.0
    if n == 0 or m == 0:
        return 0.0
    # Global alignment with gap penalty 0: maximum-weight non-crossing matching.
    prev = [0.0] * (m + 1)
    for i in range(1, n + 1):
        cur = [0.0] * (m + 1)
        for j in range(1, m + 1):
            match = prev[j - 1] + _tf_cosine(gen_tokens[i - 1], ref_tokens[j - 1])
            cur[j] = max(prev[j], cur[j - 1], match)
        prev = cur
    return prev[m] / max(n, m)


def _box_pair_score(a: BoundingBox, b: BoundingBox) -> float:
    # An exact repeat of a citation is a perfect spatial match even when the
    # box is degenerate and the IoU area ratio would be 0/0.
    if a == b:
        return 1.0
    return iou(a, b)


def _spatial_similarity(
    gen_boxes: list[BoundingBox], ref_boxes: list[BoundingBox]
) -> float:
    if not gen_boxes:
        return 0.0
    forward = sum(
        max(_box_pair_score(g, r) for r in ref_boxes) for g in gen_boxes
    ) / len(gen_boxes)
    backward = sum(
        max(_box_pair_score(g, r) for g in gen_boxes) for r in ref_boxes
    ) / len(ref_boxes)
    return 0.5 * (forward + backward)


def _deterministic_similarity(
    gen: Trajectory, ref: Trajectory, text_weight: float
) -> float:
    text = _text_similarity(gen, ref)
    ref_boxes = extract_boxes(ref)
    if not ref_boxes:
        return text
    spatial = _spatial_similarity(extract_boxes(gen), ref_boxes)
    if text == spatial:
        return text
    return text_weight * text + (1.0 - text_weight) * spatial


def _similarity_call(
    gen: Trajectory, ref: Trajectory, scorer: SimilarityScorer, heuristic: str
) -> tuple[float, bool]:
    """Score one pair; second element reports whether a fallback happened."""
    if scorer.mode is ScorerMode.DETERMINISTIC:
        return _deterministic_similarity(gen, ref, scorer.text_weight), False
    try:
        score = scorer.client().score(
            serialize_trajectory(gen), serialize_trajectory(ref), heuristic
        )
        return score, False
    except JudgeUnavailable:
        if scorer.mode is ScorerMode.REMOTE_JUDGE:
            raise
        scorer._record_fallback()
        return _deterministic_similarity(gen, ref, scorer.text_weight), True


def similarity(gen: Trajectory, ref: Trajectory, scorer: SimilarityScorer) -> float:
    """Similarity of a generated trajectory to one reference, in [0, 1]."""
    return _similarity_call(gen, ref, scorer, "")[0]


def multi_heuristic_reward_detailed(
    gen: Trajectory,
    refs: list[tuple[HeuristicTag, Trajectory]],
    scorer: SimilarityScorer,
) -> tuple[float, HeuristicTag | None, bool]:
    """Best-of-references similarity, its argmax tag, and a fallback flag.

    The argmax tag breaks ties by heuristic enumeration order, so the result
    is invariant under reordering of ``refs``.
    """
    seen: set[HeuristicTag] = set()
    for tag, _ in refs:
        if tag in seen:
            raise DuplicateHeuristicTag(f"duplicate reference tag: {tag.value}")
        seen.add(tag)
    if not refs:
        return 0.0, None, False

    best_score = -1.0
    best_tag: HeuristicTag | None = None
    any_fallback = False
    for tag, ref in refs:
        score, fell_back = _similarity_call(gen, ref, scorer, tag.value)
        any_fallback = any_fallback or fell_back
        if score > best_score or (score == best_score and tag.rank < best_tag.rank):
            best_score = score
            best_tag = tag
    return best_score, best_tag, any_fallback


def multi_heuristic_reward(
    gen: Trajectory,
    refs: list[tuple[HeuristicTag, Trajectory]],
    scorer: SimilarityScorer,
) -> tuple[float, HeuristicTag | None]:
    """Max similarity over up to three tagged references; (0, None) when empty."""
    score, tag, _ = multi_heuristic_reward_detailed(gen, refs, scorer)
    return score, tag
