"""
Salience-weighted box rewards
=============================

How localization quality turns into a scalar reward: IoU per box pair,
salience-weighted recall over the ground truths, unweighted precision over
the predictions, and their mean.
"""

from groundscore import (
    BoundingBox,
    GroundTruthObject,
    iou,
    salience_weighted_iou,
)

# Two annotated objects: the price tag is mission-critical (salience 2),
# the shelf is context (salience 1).
price_tag = GroundTruthObject(BoundingBox(120, 40, 180, 80), salience=2.0,
                              label="price tag")
shelf = GroundTruthObject(BoundingBox(0, 100, 400, 300), salience=1.0,
                          label="shelf")

# The model cited the price tag a little off, nailed the shelf, and
# hallucinated a third box.
predictions = [
    BoundingBox(125, 45, 185, 85),
    BoundingBox(0, 100, 400, 300),
    BoundingBox(500, 500, 560, 560),
]

print("pairwise IoU against the price tag:")
for p in predictions:
    print(f"  {p.as_tuple()} -> {iou(p, price_tag.box):.4f}")

result = salience_weighted_iou(predictions, [price_tag, shelf])
print(f"\nrecall    (salience-weighted): {result.recall:.4f}")
print(f"precision (hallucination tax): {result.precision:.4f}")
print(f"combined  (their mean):        {result.combined:.4f}")

print("\nbest match per ground truth (index, IoU, pred index):")
for entry in result.per_gt_best_iou:
    print(f"  {entry}")

# Doubling the critical object's salience moves recall toward its IoU.
heavier = GroundTruthObject(price_tag.box, salience=4.0, label="price tag")
boosted = salience_weighted_iou(predictions, [heavier, shelf])
print(f"\nrecall with salience 4 on the price tag: {boosted.recall:.4f}")
