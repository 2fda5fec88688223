"""
Parsing grounded reasoning traces
=================================

The trace grammar is one <think> block followed by one <answer> block, with
box citations written <box>[x1,y1,x2,y2]</box>. Parsing is total: malformed
traces come back as a report of violations instead of an exception.
"""

from groundscore import (
    ParseReport,
    extract_boxes,
    parse_trajectory,
    serialize_trajectory,
)

good = (
    "<think>The sign near the door <box>[10,20,110,80]</box>"
    "Wait, that localization is imprecise. Re-evaluating... "
    "<box>[14,22,108,78]</box> Confirmed: it reads EXIT.</think>"
    "<answer>EXIT</answer>"
)

trace = parse_trajectory(good)
print("steps:")
for step in trace.steps:
    label = step.kind.value
    body = step.box.as_tuple() if step.box else repr(step.text[:40])
    print(f"  {label:<16} {body}")
print("answer:", trace.answer)
print("tokens:", trace.token_count)
print("cited boxes:", [b.as_tuple() for b in extract_boxes(trace)])

# Canonical form: two-decimal coordinates, no padding between blocks.
print("\ncanonical serialization:")
print(" ", serialize_trajectory(trace))

# A malformed rollout: inverted box plus a missing closing tag.
bad = "<think>look <box>[9,9,3,3]</box><answer>A</answer>"
report = parse_trajectory(bad)
assert isinstance(report, ParseReport)
print("\nviolations in the malformed trace:")
for violation in report.violations:
    print(f"  chars {violation.span}: {violation.message}")
