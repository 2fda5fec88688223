"""Line-delimited record files: loading, validation, and canonical writing.

One UTF-8 JSON object per line. Boxes are 4-element ``[x1,y1,x2,y2]`` arrays,
salience defaults to 1 when absent (``"critical": true`` maps to the default
critical salience when no salience is given), and heuristic tags are the
strings ``evidence_driven`` / ``context_aware`` / ``deductive_verification``.

Loading is total: no input file crashes a non-strict load. Invalid lines are
reported with their line number and violation; strict mode turns any
violation into a :class:`ValidationFailure`. When every coordinate of a
record's boxes lies in [0, 1] and the image size is known, coordinates are
scaled to pixels and the record is flagged in the report notes — both
conventions exist in the wild and silent misinterpretation would corrupt
every IoU downstream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .errors import InvalidBox, IoFailure, NonFiniteReward, ValidationFailure
from .geometry import BoundingBox
from .grpo import RolloutGroup
from .rewards import DEFAULT_CRITICAL_SALIENCE, GroundTruthObject, RewardBreakdown
from .trajectory import HeuristicTag

MAX_REFS = 3


@dataclass(frozen=True)
class EvalSample:
    """One benchmark sample: question, gold answer, annotations, references."""

    sample_id: str
    question: str
    gold_answer: str
    category: str
    gts: tuple[GroundTruthObject, ...] = ()
    image_size: tuple[int, int] | None = None
    refs: tuple[tuple[HeuristicTag, str], ...] = ()


@dataclass(frozen=True)
class GenerationRecord:
    """One rollout: the raw trajectory text for a sample."""

    sample_id: str
    rollout_id: str
    raw: str
    model_tag: str | None = None


@dataclass(frozen=True)
class ValidationIssue:
    line_no: int | None
    message: str

    def __str__(self):
        prefix = f"line {self.line_no}: " if self.line_no is not None else ""
        return prefix + self.message


@dataclass
class ValidationReport:
    """Rejections (issues) and informational flags (notes) from one load."""

    issues: list[ValidationIssue] = field(default_factory=list)
    notes: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def reject(self, line_no, message):
        self.issues.append(ValidationIssue(line_no, message))

    def note(self, line_no, message):
        self.notes.append(ValidationIssue(line_no, message))


class _RecordError(Exception):
    """Per-line validation failure; converted into a report issue."""


def _require(record: dict, key: str, kind, label: str):
    if key not in record:
        raise _RecordError(f"missing required field {key!r}")
    value = record[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _RecordError(f"{label}.{key} is not a number: {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise _RecordError(f"{label}.{key} has wrong type: {value!r}")
    return value


def _check_known_keys(record: dict, allowed: set[str], label: str):
    unknown = set(record) - allowed
    if unknown:
        raise _RecordError(f"unknown {label} fields: {sorted(unknown)}")


def _parse_box(value, label: str) -> BoundingBox:
    if (
        not isinstance(value, list)
        or len(value) != 4
        or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in value)
    ):
        raise _RecordError(f"{label} box must be a 4-number array, got {value!r}")
    try:
        return BoundingBox(*[float(c) for c in value])
    except InvalidBox as exc:
        raise _RecordError(f"{label} box invalid: {exc}") from None


def _parse_gt(value, index: int) -> GroundTruthObject:
    label = f"gts[{index}]"
    if not isinstance(value, dict):
        raise _RecordError(f"{label} must be an object")
    _check_known_keys(value, {"box", "salience", "critical", "label"}, label)
    box = _parse_box(value.get("box"), label)
    if "salience" in value:
        salience = value["salience"]
    elif value.get("critical") is True:
        salience = DEFAULT_CRITICAL_SALIENCE
    else:
        salience = 1.0
    gt_label = value.get("label", "")
    if not isinstance(gt_label, str):
        raise _RecordError(f"{label}.label must be a string")
    try:
        return GroundTruthObject(box=box, salience=salience, label=gt_label)
    except ValueError as exc:
        raise _RecordError(f"{label}: {exc}") from None


def _all_coords_normalized(gts: list[GroundTruthObject]) -> bool:
    return bool(gts) and all(
        0.0 <= c <= 1.0 for g in gts for c in g.box.as_tuple()
    )


def parse_sample_record(record: dict) -> tuple[EvalSample, list[str]]:
    """Build an EvalSample from one decoded line; returns (sample, notes)."""
    if not isinstance(record, dict):
        raise _RecordError("record is not an object")
    _check_known_keys(
        record,
        {"sample_id", "question", "gold_answer", "category", "gts", "image_size", "refs"},
        "sample",
    )
    sample_id = _require(record, "sample_id", str, "sample")
    if not sample_id:
        raise _RecordError("sample_id must be non-empty")
    question = _require(record, "question", str, "sample")
    gold_answer = _require(record, "gold_answer", str, "sample")
    if not gold_answer.strip():
        raise _RecordError("gold_answer must be non-empty")
    category = _require(record, "category", str, "sample").strip()

    notes: list[str] = []
    gts_value = record.get("gts", [])
    if not isinstance(gts_value, list):
        raise _RecordError("gts must be an array")
    gts = [_parse_gt(g, i) for i, g in enumerate(gts_value)]

    image_size = None
    if record.get("image_size") is not None:
        size = record["image_size"]
        if (
            not isinstance(size, list)
            or len(size) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in size)
            or any(v <= 0 for v in size)
        ):
            raise _RecordError(f"image_size must be [width, height] > 0, got {size!r}")
        image_size = (int(size[0]), int(size[1]))

    if image_size is not None and _all_coords_normalized(gts):
        w, h = image_size
        gts = [replace(g, box=g.box.scaled(w, h)) for g in gts]
        notes.append("normalized gt coordinates scaled to pixels")

    if image_size is not None:
        w, h = image_size
        for i, g in enumerate(gts):
            x1, y1, x2, y2 = g.box.as_tuple()
            if x1 < 0 or y1 < 0 or x2 > w or y2 > h:
                raise _RecordError(
                    f"gts[{i}] box ({x1}, {y1}, {x2}, {y2}) exceeds image_size "
                    f"{w}x{h}; clamp it to the image bounds or fix the annotation"
                )

    refs_value = record.get("refs", [])
    if not isinstance(refs_value, list):
        raise _RecordError("refs must be an array")
    if len(refs_value) > MAX_REFS:
        raise _RecordError(f"at most {MAX_REFS} refs allowed, got {len(refs_value)}")
    refs: list[tuple[HeuristicTag, str]] = []
    seen_tags = set()
    for i, r in enumerate(refs_value):
        if not isinstance(r, dict):
            raise _RecordError(f"refs[{i}] must be an object")
        _check_known_keys(r, {"heuristic", "trajectory"}, f"refs[{i}]")
        tag_name = _require(r, "heuristic", str, f"refs[{i}]")
        try:
            tag = HeuristicTag(tag_name)
        except ValueError:
            raise _RecordError(
                f"refs[{i}].heuristic unknown: {tag_name!r}"
            ) from None
        if tag in seen_tags:
            raise _RecordError(f"refs[{i}] repeats heuristic {tag_name!r}")
        seen_tags.add(tag)
        refs.append((tag, _require(r, "trajectory", str, f"refs[{i}]")))

    sample = EvalSample(
        sample_id=sample_id,
        question=question,
        gold_answer=gold_answer,
        category=category,
        gts=tuple(gts),
        image_size=image_size,
        refs=tuple(refs),
    )
    return sample, notes


def parse_generation_record(record: dict) -> GenerationRecord:
    if not isinstance(record, dict):
        raise _RecordError("record is not an object")
    _check_known_keys(
        record, {"sample_id", "rollout_id", "raw", "model_tag"}, "generation"
    )
    sample_id = _require(record, "sample_id", str, "generation")
    rollout_id = _require(record, "rollout_id", str, "generation")
    if not sample_id or not rollout_id:
        raise _RecordError("sample_id and rollout_id must be non-empty")
    raw = _require(record, "raw", str, "generation")
    model_tag = record.get("model_tag")
    if model_tag is not None and not isinstance(model_tag, str):
        raise _RecordError("model_tag must be a string")
    return GenerationRecord(
        sample_id=sample_id, rollout_id=rollout_id, raw=raw, model_tag=model_tag
    )


def parse_group_record(record: dict) -> RolloutGroup:
    if not isinstance(record, dict):
        raise _RecordError("record is not an object")
    _check_known_keys(record, {"sample_id", "rollout_ids", "rewards"}, "group")
    sample_id = _require(record, "sample_id", str, "group")
    rollout_ids = _require(record, "rollout_ids", list, "group")
    rewards = _require(record, "rewards", list, "group")
    if any(not isinstance(r, str) for r in rollout_ids):
        raise _RecordError("rollout_ids must be strings")
    if any(isinstance(r, bool) or not isinstance(r, (int, float)) for r in rewards):
        raise _RecordError("rewards must be numbers")
    if any(not math.isfinite(float(r)) for r in rewards):
        raise _RecordError("rewards must be finite")
    try:
        return RolloutGroup(
            sample_id=sample_id,
            rewards=tuple(float(r) for r in rewards),
            rollout_ids=tuple(rollout_ids),
        )
    except ValueError as exc:
        raise _RecordError(str(exc)) from None


def _iter_lines(path):
    # errors="replace" keeps loading total: undecodable bytes become U+FFFD
    # and the line is rejected by the JSON parser with a line number.
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as f:
            for line_no, line in enumerate(f, start=1):
                if line.strip():
                    yield line_no, line
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def _finish(items, report, strict, path):
    if strict and not report.ok:
        raise ValidationFailure(
            f"{len(report.issues)} invalid record(s) in {path}", report.issues
        )
    return items, report


def load_samples(path, strict: bool = False):
    """Load sample records; returns (samples, report)."""
    samples: list[EvalSample] = []
    report = ValidationReport()
    seen: dict[str, int] = {}
    for line_no, line in _iter_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            report.reject(line_no, f"invalid JSON: {exc.msg}")
            continue
        try:
            sample, notes = parse_sample_record(record)
        except _RecordError as exc:
            report.reject(line_no, str(exc))
            continue
        if sample.sample_id in seen:
            report.reject(
                line_no,
                f"duplicate sample_id {sample.sample_id!r} "
                f"(first seen on line {seen[sample.sample_id]})",
            )
            continue
        seen[sample.sample_id] = line_no
        for note in notes:
            report.note(line_no, note)
        samples.append(sample)
    return _finish(samples, report, strict, path)


def load_generations(path, strict: bool = False):
    """Load generation records; returns (generations, report)."""
    gens: list[GenerationRecord] = []
    report = ValidationReport()
    seen: dict[tuple[str, str], int] = {}
    for line_no, line in _iter_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            report.reject(line_no, f"invalid JSON: {exc.msg}")
            continue
        try:
            gen = parse_generation_record(record)
        except _RecordError as exc:
            report.reject(line_no, str(exc))
            continue
        key = (gen.sample_id, gen.rollout_id)
        if key in seen:
            report.reject(
                line_no,
                f"duplicate (sample_id, rollout_id) {key!r} "
                f"(first seen on line {seen[key]})",
            )
            continue
        seen[key] = line_no
        gens.append(gen)
    return _finish(gens, report, strict, path)


def load_groups(path, strict: bool = False):
    """Load rollout-group records; returns (groups, report)."""
    groups: list[RolloutGroup] = []
    report = ValidationReport()
    seen: dict[str, int] = {}
    for line_no, line in _iter_lines(path):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            report.reject(line_no, f"invalid JSON: {exc.msg}")
            continue
        try:
            group = parse_group_record(record)
        except (_RecordError, NonFiniteReward, ValueError) as exc:
            report.reject(line_no, str(exc))
            continue
        if group.sample_id in seen:
            report.reject(
                line_no,
                f"duplicate sample_id {group.sample_id!r} "
                f"(first seen on line {seen[group.sample_id]})",
            )
            continue
        seen[group.sample_id] = line_no
        groups.append(group)
    return _finish(groups, report, strict, path)


def join_generations(samples, generations):
    """Pair each generation with its sample; unmatched ones are orphans."""
    by_id = {s.sample_id: s for s in samples}
    pairs = []
    orphans = []
    for gen in generations:
        sample = by_id.get(gen.sample_id)
        if sample is None:
            orphans.append(gen)
        else:
            pairs.append((sample, gen))
    return pairs, orphans


# --- canonical writing -------------------------------------------------------


def dump_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def sample_to_record(s: EvalSample) -> dict:
    record = {
        "sample_id": s.sample_id,
        "question": s.question,
        "gold_answer": s.gold_answer,
        "category": s.category,
        "gts": [
            {"box": list(g.box.as_tuple()), "salience": g.salience, "label": g.label}
            for g in s.gts
        ],
    }
    if s.image_size is not None:
        record["image_size"] = list(s.image_size)
    record["refs"] = [
        {"heuristic": tag.value, "trajectory": raw} for tag, raw in s.refs
    ]
    return record


def generation_to_record(g: GenerationRecord) -> dict:
    record = {"sample_id": g.sample_id, "rollout_id": g.rollout_id, "raw": g.raw}
    if g.model_tag is not None:
        record["model_tag"] = g.model_tag
    return record


def group_to_record(g: RolloutGroup) -> dict:
    return {
        "sample_id": g.sample_id,
        "rollout_ids": list(g.rollout_ids),
        "rewards": list(g.rewards),
    }


def breakdown_to_record(
    sample_id: str, rollout_id: str, b: RewardBreakdown
) -> dict:
    return {
        "sample_id": sample_id,
        "rollout_id": rollout_id,
        "r_acc": b.r_acc,
        "r_fmt": b.r_fmt,
        "r_recall": b.r_recall,
        "r_precision": b.r_precision,
        "r_swiou": b.r_swiou,
        "r_mhr": b.r_mhr,
        "r_len": b.r_len,
        "r_total": b.r_total,
        "best_heuristic": b.best_heuristic.value if b.best_heuristic else None,
        "per_gt_best_iou": [[k, v, i] for k, v, i in b.per_gt_best_iou],
        "flags": list(b.flags),
    }


def write_records(path, records) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(dump_record(record))
                f.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_samples(path, samples) -> None:
    write_records(path, (sample_to_record(s) for s in samples))


def write_generations(path, generations) -> None:
    write_records(path, (generation_to_record(g) for g in generations))
