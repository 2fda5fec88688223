"""Grammar, parser, and canonical serializer for grounded reasoning traces.

A trace is exactly one ``<think>...</think>`` block followed by exactly one
``<answer>...</answer>`` block. Inside the think block, box citations are
written ``<box>[x1,y1,x2,y2]</box>`` with decimal coordinates and optional
spaces after the commas. Text that opens with a self-correction marker
("Wait, ..." by default) becomes its own step kind so that meta-cognitive
behaviour stays visible to downstream scoring.

Parsing never raises: malformed input yields a :class:`ParseReport` listing
every violation with character offsets, which the format reward consumes.
Coordinates are quantized to the rendering precision (two decimals) at parse
time so that parse/serialize round-trips are exact.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import InvalidBox
from .geometry import BoundingBox

COORD_DECIMALS = 2

DEFAULT_SELF_CORRECTION_MARKERS = ("wait,", "wait ")

_NUM = r"-?\d+(?:\.\d+)?"
_BOX_TAG_RE = re.compile(r"<box>(.*?)</box>", re.DOTALL)
_BOX_BODY_RE = re.compile(
    rf"\[\s*({_NUM})\s*,\s*({_NUM})\s*,\s*({_NUM})\s*,\s*({_NUM})\s*\]"
)
_STRUCTURE_RE = re.compile(
    r"\s*<think>(.*)</think>\s*<answer>(.*)</answer>\s*\Z", re.DOTALL
)


class StepKind(enum.Enum):
    TEXT = "text"
    BOX_CITATION = "box_citation"
    SELF_CORRECTION = "self_correction"


class HeuristicTag(enum.Enum):
    """The three canonical reasoning pathways, in tie-break order."""

    EVIDENCE_DRIVEN = "evidence_driven"
    CONTEXT_AWARE = "context_aware"
    DEDUCTIVE_VERIFICATION = "deductive_verification"

    @property
    def rank(self) -> int:
        return _TAG_RANK[self]


_TAG_RANK = {tag: i for i, tag in enumerate(HeuristicTag)}


@dataclass(frozen=True)
class TrajectoryStep:
    """One parsed step: a text span, a self-correction span, or a box citation.

    ``char_span`` is the half-open (start, end) offset range into the raw
    source string; for a box citation it covers the full ``<box>...</box>``
    markup. Spans are positional metadata and do not participate in
    structural equality.
    """

    kind: StepKind
    text: str = ""
    box: BoundingBox | None = None
    char_span: tuple[int, int] = field(default=(0, 0), compare=False)

    def __post_init__(self):
        if self.kind is StepKind.BOX_CITATION:
            if self.box is None or self.text:
                raise ValueError("box citation steps carry a box and no text")
        elif self.box is not None:
            raise ValueError("text steps carry no box")

    @property
    def is_textual(self) -> bool:
        return self.kind is not StepKind.BOX_CITATION


@dataclass(frozen=True)
class Trajectory:
    """A parsed reasoning trace: ordered steps plus the final answer."""

    steps: tuple[TrajectoryStep, ...]
    answer: str
    token_count: int
    raw: str

    def text_steps(self) -> tuple[TrajectoryStep, ...]:
        return tuple(s for s in self.steps if s.is_textual)


@dataclass(frozen=True)
class ParseViolation:
    message: str
    span: tuple[int, int]


@dataclass(frozen=True)
class ParseReport:
    """The total-parse failure result: every violation, with char offsets."""

    raw: str
    violations: tuple[ParseViolation, ...] = ()


ParseResult = Trajectory | ParseReport


def count_tokens(raw: str) -> int:
    """Number of maximal non-whitespace runs; the engine's length proxy."""
    return len(raw.split())


def empty_trajectory(raw: str = "") -> Trajectory:
    """The trajectory a failed parse degrades to: no steps, empty answer.

    token_count is still taken from the raw text so the length penalty
    applies to overlong malformed rollouts.
    """
    return Trajectory(steps=(), answer="", token_count=count_tokens(raw), raw=raw)


def _quantize(value: float) -> float:
    q = round(value, COORD_DECIMALS)
    return 0.0 if q == 0 else q


def _format_coord(value: float) -> str:
    return f"{_quantize(value):.{COORD_DECIMALS}f}"


def _classify_text(segment: str, markers: tuple[str, ...]) -> StepKind:
    lowered = segment.lstrip().lower()
    for marker in markers:
        if lowered.startswith(marker.lower()):
            return StepKind.SELF_CORRECTION
    return StepKind.TEXT


def parse_trajectory(
    raw: str,
    self_correction_markers: tuple[str, ...] = DEFAULT_SELF_CORRECTION_MARKERS,
) -> ParseResult:
    """Parse a raw trace into a Trajectory, or a ParseReport on any violation.

    Never raises. The step list covers the think-section content exactly
    (concatenating ``raw[start:end]`` over all steps reproduces it), with box
    citations extracted wherever the box grammar matches.
    """
    violations: list[ParseViolation] = []

    for tag in ("<think>", "</think>", "<answer>", "</answer>"):
        n = raw.count(tag)
        if n == 0:
            violations.append(ParseViolation(f"missing {tag} tag", (0, len(raw))))
        elif n > 1:
            # point at the second occurrence
            pos = raw.index(tag, raw.index(tag) + 1)
            violations.append(
                ParseViolation(f"multiple {tag} tags", (pos, pos + len(tag)))
            )
    if violations:
        return ParseReport(raw, tuple(violations))

    structure = _STRUCTURE_RE.match(raw)
    if structure is None:
        violations.append(
            ParseViolation(
                "expected <think>...</think> followed by <answer>...</answer> "
                "with nothing else outside the blocks",
                (0, len(raw)),
            )
        )
        return ParseReport(raw, tuple(violations))

    think_start, think_end = structure.start(1), structure.end(1)
    think_content = structure.group(1)
    answer = structure.group(2).strip()

    box_matches = list(_BOX_TAG_RE.finditer(raw, think_start, think_end))
    if think_content.count("<box>") != len(box_matches) or think_content.count(
        "</box>"
    ) != len(box_matches):
        pos = raw.find("<box>", think_start, think_end)
        if pos < 0:
            pos = raw.find("</box>", think_start, think_end)
        violations.append(
            ParseViolation("unmatched <box> / </box> tag", (max(pos, 0), think_end))
        )

    boxes: list[BoundingBox | None] = []
    for m in box_matches:
        body = _BOX_BODY_RE.fullmatch(m.group(1).strip())
        if body is None:
            violations.append(
                ParseViolation(
                    "box citation does not match [x1,y1,x2,y2]", m.span()
                )
            )
            boxes.append(None)
            continue
        coords = [_quantize(float(body.group(i))) for i in range(1, 5)]
        try:
            boxes.append(BoundingBox(*coords))
        except InvalidBox as exc:
            violations.append(ParseViolation(f"invalid box: {exc}", m.span()))
            boxes.append(None)

    if violations:
        return ParseReport(raw, tuple(violations))

    steps: list[TrajectoryStep] = []
    cursor = think_start
    for m, box in zip(box_matches, boxes):
        if m.start() > cursor:
            segment = raw[cursor : m.start()]
            steps.append(
                TrajectoryStep(
                    kind=_classify_text(segment, self_correction_markers),
                    text=segment,
                    char_span=(cursor, m.start()),
                )
            )
        steps.append(
            TrajectoryStep(kind=StepKind.BOX_CITATION, box=box, char_span=m.span())
        )
        cursor = m.end()
    if cursor < think_end:
        segment = raw[cursor:think_end]
        steps.append(
            TrajectoryStep(
                kind=_classify_text(segment, self_correction_markers),
                text=segment,
                char_span=(cursor, think_end),
            )
        )

    return Trajectory(
        steps=tuple(steps),
        answer=answer,
        token_count=count_tokens(raw),
        raw=raw,
    )


def serialize_trajectory(t: Trajectory) -> str:
    """Canonical rendering: boxes at fixed two-decimal precision, no padding
    between the think and answer blocks. ``parse(serialize(parse(s)))`` equals
    ``parse(s)`` structurally for every parseable ``s``.
    """
    parts = ["<think>"]
    for step in t.steps:
        if step.kind is StepKind.BOX_CITATION:
            coords = ",".join(_format_coord(c) for c in step.box.as_tuple())
            parts.append(f"<box>[{coords}]</box>")
        else:
            parts.append(step.text)
    parts.append("</think><answer>")
    parts.append(t.answer)
    parts.append("</answer>")
    return "".join(parts)


def extract_boxes(t: Trajectory) -> list[BoundingBox]:
    """All cited boxes in step order, duplicates preserved."""
    return [s.box for s in t.steps if s.kind is StepKind.BOX_CITATION]
