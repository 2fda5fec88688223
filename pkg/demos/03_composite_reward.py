"""
The composite reward, end to end
================================

One generation is scored against its sample: answer accuracy, format
compliance, the salience-weighted dual IoU, best-of-three similarity to
reference reasoning pathways, and a soft length penalty, summed with
configurable weights.
"""

from groundscore import (
    BoundingBox,
    EvalSample,
    GroundTruthObject,
    HeuristicTag,
    RewardConfig,
    SimilarityScorer,
    parse_trajectory,
    total_reward,
)

sample = EvalSample(
    sample_id="demo",
    question="What does the sign near the door read?",
    gold_answer="EXIT",
    category="OCR",
    gts=(
        GroundTruthObject(BoundingBox(10, 20, 110, 80), salience=2.0, label="sign"),
        GroundTruthObject(BoundingBox(200, 0, 360, 240), salience=1.0, label="door"),
    ),
)

references = [
    (
        HeuristicTag.EVIDENCE_DRIVEN,
        parse_trajectory(
            "<think>Zooming into the sign <box>[10,20,110,80]</box>, the "
            "letters spell EXIT.</think><answer>EXIT</answer>"
        ),
    ),
    (
        HeuristicTag.CONTEXT_AWARE,
        parse_trajectory(
            "<think>Doors like <box>[200,0,360,240]</box> usually carry exit "
            "signage; the sign <box>[10,20,110,80]</box> confirms it.</think>"
            "<answer>EXIT</answer>"
        ),
    ),
]

generation = (
    "<think>Zooming into the sign <box>[12,22,108,79]</box>, the letters "
    "spell EXIT.</think><answer>exit.</answer>"
)

breakdown = total_reward(
    generation, sample, references, RewardConfig(), SimilarityScorer()
)
for name in ("r_acc", "r_fmt", "r_recall", "r_precision", "r_swiou",
             "r_mhr", "r_len", "r_total"):
    print(f"{name:<12} {getattr(breakdown, name): .4f}")
print("best heuristic:", breakdown.best_heuristic)
print("flags:", breakdown.flags)

# Malformed rollouts still get a full breakdown (r_fmt = 0), so a GRPO group
# stays comparable.
broken = total_reward(
    "<think>no closing tag", sample, references, RewardConfig(),
    SimilarityScorer(),
)
print(f"\nmalformed rollout: r_fmt={broken.r_fmt}, r_swiou={broken.r_swiou}, "
      f"r_total={broken.r_total:.3f}, flags={broken.flags}")
