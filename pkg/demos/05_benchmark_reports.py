"""
Benchmark reports and baseline deltas
=====================================

Scoring a prediction set produces per-category accuracy, an overall score,
and mIoU (the unweighted dual IoU over annotated samples). A second report
serves as a baseline for signed delta rows.

The same pipeline is exposed as a CLI:

    groundscore evaluate --samples samples.jsonl --generations preds.jsonl \
        --baseline baseline_report.jsonl --out report.jsonl
"""

from groundscore import (
    BoundingBox,
    EvalSample,
    GenerationRecord,
    GroundTruthObject,
    delta_report,
    evaluate,
    parse_report,
    render_report,
)


def sample(i, category, gold, box=None):
    gts = (GroundTruthObject(BoundingBox(*box)),) if box else ()
    return EvalSample(f"s{i}", "q?", gold, category, gts=gts)


def generation(i, answer, box=None):
    cite = f"<box>[{box[0]},{box[1]},{box[2]},{box[3]}]</box> " if box else ""
    raw = f"<think>{cite}looking closely.</think><answer>{answer}</answer>"
    return GenerationRecord(f"s{i}", "r0", raw)


samples = [
    sample(0, "OCR", "EXIT", box=(10, 20, 110, 80)),
    sample(1, "OCR", "open"),
    sample(2, "Spa. Cont.", "behind the car", box=(0, 0, 50, 50)),
    sample(3, "Spa. Cont.", "left shelf", box=(5, 5, 60, 60)),
    sample(4, "Comparison", "two"),
]
generations = [
    generation(0, "EXIT", box=(10, 20, 110, 80)),
    generation(1, "closed"),
    generation(2, "behind the car", box=(0, 0, 48, 52)),
    generation(3, "left shelf", box=(200, 200, 260, 260)),
    generation(4, "two"),
]

report = evaluate(samples, generations)
print(render_report(report, "table"))

# The records format round-trips for storage and later comparison.
stored = render_report(report, "records")
assert parse_report(stored) == report

weaker = evaluate(samples, generations[:3])
delta = delta_report(report, weaker)
print(render_report(delta, "table"))
print("flags:", report.flags)
