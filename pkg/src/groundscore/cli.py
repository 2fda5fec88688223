"""Batch command-line surface over the scoring engine.

Commands: ``score`` (reward breakdowns per generation), ``evaluate``
(benchmark report, optionally with deltas against a baseline report),
``advantages`` (group-relative advantages), ``validate`` (record-file
checks), and ``compare`` (delta between two report files).

Exit codes: 0 success, 1 I/O failure, 2 validation or strict-mode failure,
3 judge failure without fallback. Diagnostics go to stderr only; stdout and
output files carry data.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .errors import (
    DuplicateSampleId,
    IoFailure,
    JudgeUnavailable,
    ValidationFailure,
)
from .evaluation import (
    delta_report,
    evaluate,
    parse_report,
    render_report,
)
from .records import (
    breakdown_to_record,
    dump_record,
    join_generations,
    load_generations,
    load_groups,
    load_samples,
    write_records,
)
from .rewards import RewardConfig, total_reward
from .similarity import ScorerMode, SimilarityScorer
from .trajectory import ParseReport, empty_trajectory, parse_trajectory

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_JUDGE = 3

JUDGE_ENDPOINT_ENV = "GRIP_JUDGE_ENDPOINT"

_SCORER_MODES = {
    "deterministic": ScorerMode.DETERMINISTIC,
    "judge": ScorerMode.REMOTE_JUDGE,
    "judge-fallback": ScorerMode.JUDGE_WITH_FALLBACK,
}


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _report_diagnostics(path, report) -> None:
    for issue in report.issues:
        _diag(f"{path}: {issue}")
    for note in report.notes:
        _diag(f"{path}: note: {note}")


def _build_scorer(args) -> SimilarityScorer:
    mode = _SCORER_MODES[args.scorer]
    endpoint = args.judge_endpoint or os.environ.get(JUDGE_ENDPOINT_ENV)
    if mode is not ScorerMode.DETERMINISTIC and not endpoint:
        raise ValidationFailure(
            f"--scorer {args.scorer} needs --judge-endpoint or ${JUDGE_ENDPOINT_ENV}"
        )
    return SimilarityScorer(
        mode=mode,
        judge_endpoint=endpoint,
        timeout_ms=args.judge_timeout_ms,
    )


def _load_config(path) -> RewardConfig:
    if path is None:
        return RewardConfig()
    try:
        return RewardConfig.from_file(path)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise ValidationFailure(f"bad config {path}: {exc}") from exc


def _parse_refs(sample):
    """Parse a sample's reference trajectories once; unparseable references
    degrade to the empty trajectory rather than failing the sample."""
    refs = []
    for tag, raw in sample.refs:
        parsed = parse_trajectory(raw)
        if isinstance(parsed, ParseReport):
            parsed = empty_trajectory(raw)
        refs.append((tag, parsed))
    return refs


def cmd_score(args) -> int:
    cfg = _load_config(args.config)
    scorer = _build_scorer(args)
    samples, sample_report = load_samples(args.samples, strict=args.strict)
    _report_diagnostics(args.samples, sample_report)
    gens, gen_report = load_generations(args.generations, strict=args.strict)
    _report_diagnostics(args.generations, gen_report)

    pairs, orphans = join_generations(samples, gens)
    for orphan in orphans:
        _diag(
            f"orphan generation ({orphan.sample_id!r}, {orphan.rollout_id!r}): "
            "no matching sample"
        )
    if args.strict and orphans:
        return EXIT_VALIDATION

    refs_by_sample = {s.sample_id: _parse_refs(s) for s in samples}

    def score_pair(pair):
        sample, gen = pair
        breakdown = total_reward(
            gen.raw, sample, refs_by_sample[sample.sample_id], cfg, scorer
        )
        return breakdown_to_record(sample.sample_id, gen.rollout_id, breakdown)

    if args.parallelism > 1:
        with ThreadPoolExecutor(max_workers=args.parallelism) as pool:
            records = list(pool.map(score_pair, pairs))
    else:
        records = [score_pair(p) for p in pairs]

    records += [
        {
            "sample_id": o.sample_id,
            "rollout_id": o.rollout_id,
            "error": "orphan generation: no matching sample",
        }
        for o in orphans
    ]
    records.sort(key=lambda r: (r["sample_id"], r["rollout_id"]))
    write_records(args.out, records)

    parse_failures = sum(1 for r in records if "parse_failure" in r.get("flags", ()))
    _diag(
        f"scored {len(pairs)} generation(s): parse_failures={parse_failures} "
        f"judge_fallbacks={scorer.fallback_count} orphans={len(orphans)}"
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _load_config(args.config)
    scorer = _build_scorer(args)
    samples, sample_report = load_samples(args.samples, strict=args.strict)
    _report_diagnostics(args.samples, sample_report)
    gens, gen_report = load_generations(args.generations, strict=args.strict)
    _report_diagnostics(args.generations, gen_report)

    seen = set()
    for gen in gens:
        if gen.sample_id in seen:
            _diag(
                f"extra generation for sample {gen.sample_id!r}; "
                "evaluation uses the first"
            )
        seen.add(gen.sample_id)

    report = evaluate(samples, gens, cfg, scorer)
    output = render_report(report, "records")
    sys.stdout.write(render_report(report, "table"))

    if args.baseline is not None:
        try:
            with open(args.baseline, "r", encoding="utf-8") as f:
                baseline = parse_report(f.read())
        except OSError as exc:
            raise IoFailure(f"cannot read baseline {args.baseline}: {exc}") from exc
        except ValueError as exc:
            raise ValidationFailure(f"bad baseline report: {exc}") from exc
        delta = delta_report(report, baseline)
        output += render_report(delta, "records")
        sys.stdout.write(render_report(delta, "table"))

    try:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(output)
    except OSError as exc:
        raise IoFailure(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_advantages(args) -> int:
    groups, report = load_groups(args.groups, strict=args.strict)
    _report_diagnostics(args.groups, report)
    # A groups file must be fully valid: silently dropping a bad group would
    # desynchronize the trainer's rollout order.
    if not report.ok:
        return EXIT_VALIDATION
    from .grpo import batch_advantages

    advantages = batch_advantages(groups, eps=args.eps)
    records = []
    for group in groups:
        for rollout_id, advantage in zip(
            group.rollout_ids, advantages[group.sample_id]
        ):
            records.append(
                {
                    "sample_id": group.sample_id,
                    "rollout_id": rollout_id,
                    "advantage": advantage,
                }
            )
    write_records(args.out, records)
    _diag(f"computed advantages for {len(groups)} group(s)")
    return EXIT_OK


def cmd_validate(args) -> int:
    any_issue = False
    checked = False
    for path, loader in (
        (args.samples, load_samples),
        (args.generations, load_generations),
        (args.groups, load_groups),
    ):
        if path is None:
            continue
        checked = True
        items, report = loader(path, strict=False)
        _report_diagnostics(path, report)
        _diag(f"{path}: {len(items)} valid record(s), {len(report.issues)} rejected")
        any_issue = any_issue or not report.ok
    if not checked:
        _diag("nothing to validate: pass --samples, --generations, or --groups")
        return EXIT_VALIDATION
    return EXIT_VALIDATION if any_issue else EXIT_OK


def cmd_compare(args) -> int:
    def read_report(path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                return parse_report(f.read())
        except OSError as exc:
            raise IoFailure(f"cannot read report {path}: {exc}") from exc
        except ValueError as exc:
            raise ValidationFailure(f"bad report {path}: {exc}") from exc

    current = read_report(args.report)
    baseline = read_report(args.baseline)
    delta = delta_report(current, baseline)
    sys.stdout.write(render_report(delta, "table"))
    if args.out is not None:
        try:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(render_report(delta, "records"))
        except OSError as exc:
            raise IoFailure(f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def _add_scorer_flags(parser):
    parser.add_argument(
        "--scorer",
        choices=sorted(_SCORER_MODES),
        default="deterministic",
        help="similarity/judge mode (default: deterministic)",
    )
    parser.add_argument(
        "--judge-endpoint",
        default=None,
        help=f"judge URL; falls back to ${JUDGE_ENDPOINT_ENV}",
    )
    parser.add_argument(
        "--judge-timeout-ms",
        type=float,
        default=10_000.0,
        help="per-request judge timeout in milliseconds",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groundscore",
        description="Reward scoring and evaluation for grounded reasoning traces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_score = sub.add_parser("score", help="write one reward breakdown per generation")
    p_score.add_argument("--samples", required=True)
    p_score.add_argument("--generations", required=True)
    p_score.add_argument("--config", default=None)
    p_score.add_argument("--out", required=True)
    p_score.add_argument("--strict", action="store_true")
    p_score.add_argument("--parallelism", type=int, default=1)
    _add_scorer_flags(p_score)
    p_score.set_defaults(func=cmd_score)

    p_eval = sub.add_parser("evaluate", help="write a benchmark report")
    p_eval.add_argument("--samples", required=True)
    p_eval.add_argument("--generations", required=True)
    p_eval.add_argument("--baseline", default=None)
    p_eval.add_argument("--config", default=None)
    p_eval.add_argument("--out", required=True)
    p_eval.add_argument("--strict", action="store_true")
    _add_scorer_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_adv = sub.add_parser("advantages", help="group-relative advantages per rollout")
    p_adv.add_argument("--groups", required=True)
    p_adv.add_argument("--eps", type=float, default=1e-8)
    p_adv.add_argument("--out", required=True)
    p_adv.add_argument("--strict", action="store_true")
    p_adv.set_defaults(func=cmd_advantages)

    p_val = sub.add_parser("validate", help="check record files")
    p_val.add_argument("--samples", default=None)
    p_val.add_argument("--generations", default=None)
    p_val.add_argument("--groups", default=None)
    p_val.add_argument("--strict", action="store_true")
    p_val.set_defaults(func=cmd_validate)

    p_cmp = sub.add_parser("compare", help="delta between two report files")
    p_cmp.add_argument("report", help="current report (records format)")
    p_cmp.add_argument("--baseline", required=True)
    p_cmp.add_argument("--out", default=None)
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "parallelism", 1) < 1:
        _diag("--parallelism must be >= 1")
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except (IoFailure, OSError) as exc:
        _diag(f"I/O failure: {exc}")
        return EXIT_IO
    except (ValidationFailure, DuplicateSampleId) as exc:
        _diag(f"validation failure: {exc}")
        if isinstance(exc, ValidationFailure):
            for issue in exc.issues:
                _diag(str(issue))
        return EXIT_VALIDATION
    except JudgeUnavailable as exc:
        _diag(f"judge failure: {exc}")
        return EXIT_JUDGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
