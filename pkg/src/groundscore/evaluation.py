"""Benchmark scoring: overall and per-category accuracy, mIoU, and deltas.

mIoU is the unweighted dual IoU — (recall + precision) / 2 with every
salience forced to 1 — averaged over samples that carry annotations; samples
with no ground-truth boxes stay out of the denominator. Missing generations
score 0 accuracy and 0 IoU and are counted in the report flags rather than
silently dropped. Percentages render to one decimal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import JudgeUnavailable
from .rewards import (
    AnswerMatching,
    RewardConfig,
    _accuracy_with_scorer,
    salience_weighted_recall,
    scaled_predictions,
    unweighted_precision,
)
from .similarity import SimilarityScorer
from .trajectory import ParseReport, empty_trajectory, parse_trajectory


@dataclass(frozen=True)
class ReportFlags:
    parse_failures: int = 0
    unannotated_samples: int = 0
    judge_fallbacks: int = 0
    missing_generations: int = 0


@dataclass(frozen=True)
class EvaluationReport:
    overall_accuracy: float  # percentage
    per_category: dict  # category -> (accuracy percentage, sample count)
    miou: float | None  # percentage; None when nothing is annotated
    sample_count: int
    flags: ReportFlags = ReportFlags()


@dataclass(frozen=True)
class DeltaReport:
    overall_delta: float
    per_category_delta: dict  # category -> signed difference
    miou_delta: float | None
    missing_categories: tuple[str, ...] = ()


def _unweighted_dual_iou(preds, gts) -> float:
    flat = [replace(g, salience=1.0) for g in gts]
    recall = salience_weighted_recall(preds, flat)
    precision = unweighted_precision(preds, flat)
    return (recall + precision) / 2.0


def evaluate(
    samples,
    generations,
    cfg: RewardConfig | None = None,
    scorer: SimilarityScorer | None = None,
) -> EvaluationReport:
    """Score one generation per sample and aggregate per category.

    ``scorer`` is only consulted when the config asks for remote-judge answer
    matching; judge fallbacks are counted in the report flags.
    """
    cfg = cfg or RewardConfig()
    if cfg.answer_matching is AnswerMatching.REMOTE_JUDGE and scorer is None:
        raise JudgeUnavailable("remote-judge answer matching needs a scorer")
    scorer = scorer or SimilarityScorer()

    by_sample: dict[str, object] = {}
    for gen in generations:
        by_sample.setdefault(gen.sample_id, gen)

    parse_failures = 0
    missing = 0
    unannotated = 0
    fallbacks = 0
    category_correct: dict[str, int] = {}
    category_count: dict[str, int] = {}
    iou_values: list[float] = []

    for sample in samples:
        category = sample.category.strip()
        category_count[category] = category_count.get(category, 0) + 1
        annotated = bool(sample.gts)
        if not annotated:
            unannotated += 1

        gen = by_sample.get(sample.sample_id)
        if gen is None:
            missing += 1
            if annotated:
                iou_values.append(0.0)
            continue

        parsed = parse_trajectory(gen.raw)
        if isinstance(parsed, ParseReport):
            parse_failures += 1
            traj = empty_trajectory(gen.raw)
        else:
            traj = parsed

        correct, fell_back = _accuracy_with_scorer(
            traj.answer, sample.gold_answer, cfg, scorer
        )
        if fell_back:
            fallbacks += 1
        category_correct[category] = category_correct.get(category, 0) + correct

        if annotated:
            preds, _ = scaled_predictions(traj, sample.image_size)
            iou_values.append(_unweighted_dual_iou(preds, list(sample.gts)))

    sample_count = len(samples)
    total_correct = sum(category_correct.values())
    overall = 100.0 * total_correct / sample_count if sample_count else 0.0
    per_category = {
        cat: (100.0 * category_correct.get(cat, 0) / count, count)
        for cat, count in sorted(category_count.items())
    }
    miou = 100.0 * sum(iou_values) / len(iou_values) if iou_values else None
    return EvaluationReport(
        overall_accuracy=overall,
        per_category=per_category,
        miou=miou,
        sample_count=sample_count,
        flags=ReportFlags(
            parse_failures=parse_failures,
            unannotated_samples=unannotated,
            judge_fallbacks=fallbacks,
            missing_generations=missing,
        ),
    )


def delta_report(current: EvaluationReport, baseline: EvaluationReport) -> DeltaReport:
    """Signed current-minus-baseline differences per column."""
    shared = sorted(set(current.per_category) & set(baseline.per_category))
    missing = sorted(
        set(current.per_category) ^ set(baseline.per_category)
    )
    deltas = {
        cat: current.per_category[cat][0] - baseline.per_category[cat][0]
        for cat in shared
    }
    miou_delta = None
    if current.miou is not None and baseline.miou is not None:
        miou_delta = current.miou - baseline.miou
    return DeltaReport(
        overall_delta=current.overall_accuracy - baseline.overall_accuracy,
        per_category_delta=deltas,
        miou_delta=miou_delta,
        missing_categories=tuple(missing),
    )


def _fmt_pct(value: float | None) -> str:
    return "-" if value is None else f"{value:.1f}"


def _fmt_delta(value: float | None) -> str:
    if value is None:
        return "-"
    rendered = f"{value:+.1f}"
    return "+0.0" if rendered == "-0.0" else rendered


def _table(columns: list[tuple[str, str]]) -> str:
    widths = [max(len(name), len(value)) for name, value in columns]
    header = "  ".join(name.ljust(w) for (name, _), w in zip(columns, widths))
    row = "  ".join(value.rjust(w) for (_, value), w in zip(columns, widths))
    return header.rstrip() + "\n" + row + "\n"


def render_report(report, format: str = "table") -> str:
    """Render an EvaluationReport or DeltaReport.

    ``table`` is fixed width with one-decimal percentages (header row plus
    one value row); ``records`` is line-delimited JSON that round-trips via
    :func:`parse_report` / :func:`parse_delta_report`.
    """
    if format not in ("table", "records"):
        raise ValueError(f"unknown format {format!r}")
    if isinstance(report, EvaluationReport):
        if format == "table":
            columns = [
                ("Overall", _fmt_pct(report.overall_accuracy)),
                ("mIoU", _fmt_pct(report.miou)),
            ]
            columns += [
                (cat, _fmt_pct(acc))
                for cat, (acc, _) in sorted(report.per_category.items())
            ]
            return _table(columns)
        lines = [
            {
                "record": "report_summary",
                "overall_accuracy": report.overall_accuracy,
                "miou": report.miou,
                "sample_count": report.sample_count,
                "flags": {
                    "parse_failures": report.flags.parse_failures,
                    "unannotated_samples": report.flags.unannotated_samples,
                    "judge_fallbacks": report.flags.judge_fallbacks,
                    "missing_generations": report.flags.missing_generations,
                },
            }
        ]
        lines += [
            {
                "record": "report_category",
                "category": cat,
                "accuracy": acc,
                "count": count,
            }
            for cat, (acc, count) in sorted(report.per_category.items())
        ]
    elif isinstance(report, DeltaReport):
        if format == "table":
            columns = [
                ("Overall", _fmt_delta(report.overall_delta)),
                ("mIoU", _fmt_delta(report.miou_delta)),
            ]
            columns += [
                (cat, _fmt_delta(delta))
                for cat, delta in sorted(report.per_category_delta.items())
            ]
            return _table(columns)
        lines = [
            {
                "record": "delta_summary",
                "overall_delta": report.overall_delta,
                "miou_delta": report.miou_delta,
                "missing_categories": list(report.missing_categories),
            }
        ]
        lines += [
            {"record": "delta_category", "category": cat, "delta": delta}
            for cat, delta in sorted(report.per_category_delta.items())
        ]
    else:
        raise TypeError(f"cannot render {type(report).__name__}")
    return "".join(
        json.dumps(line, ensure_ascii=False, separators=(",", ":")) + "\n"
        for line in lines
    )


def parse_report(text: str) -> EvaluationReport:
    """Rebuild an EvaluationReport from its records rendering."""
    summary = None
    per_category = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        kind = record.get("record")
        if kind == "report_summary":
            summary = record
        elif kind == "report_category":
            per_category[record["category"]] = (
                record["accuracy"],
                record["count"],
            )
    if summary is None:
        raise ValueError("no report_summary record found")
    flags = summary.get("flags", {})
    return EvaluationReport(
        overall_accuracy=summary["overall_accuracy"],
        per_category=per_category,
        miou=summary["miou"],
        sample_count=summary["sample_count"],
        flags=ReportFlags(
            parse_failures=flags.get("parse_failures", 0),
            unannotated_samples=flags.get("unannotated_samples", 0),
            judge_fallbacks=flags.get("judge_fallbacks", 0),
            missing_generations=flags.get("missing_generations", 0),
        ),
    )


def parse_delta_report(text: str) -> DeltaReport:
    """Rebuild a DeltaReport from its records rendering."""
    summary = None
    deltas = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        kind = record.get("record")
        if kind == "delta_summary":
            summary = record
        elif kind == "delta_category":
            deltas[record["category"]] = record["delta"]
    if summary is None:
        raise ValueError("no delta_summary record found")
    return DeltaReport(
        overall_delta=summary["overall_delta"],
        per_category_delta=deltas,
        miou_delta=summary["miou_delta"],
        missing_categories=tuple(summary.get("missing_categories", [])),
    )
