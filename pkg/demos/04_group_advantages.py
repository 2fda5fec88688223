"""
Group-relative advantages
=========================

Each rollout's advantage is its reward standardized against its own group:
(r - mean) / (std + eps) with the population std. Constant groups
short-circuit to zero instead of amplifying eps noise.
"""

from groundscore import RolloutGroup, batch_advantages, group_advantages

group = RolloutGroup(
    sample_id="prompt-7",
    rewards=(3.9, 2.1, 0.4, 3.9),
    rollout_ids=("r0", "r1", "r2", "r3"),
)

for rollout_id, reward, advantage in zip(
    group.rollout_ids, group.rewards, group_advantages(group)
):
    print(f"{rollout_id}: reward {reward: .2f} -> advantage {advantage: .4f}")

# Shifting every reward by a constant changes nothing: the baseline is the
# group mean.
shifted = RolloutGroup("prompt-7", tuple(r + 100 for r in group.rewards),
                       group.rollout_ids)
drift = max(
    abs(a - b)
    for a, b in zip(group_advantages(shifted), group_advantages(group))
)
print(f"\nshift-invariant to within {drift:.2e}")

# Degenerate group: all rollouts scored the same.
flat = RolloutGroup("prompt-8", (2.5, 2.5, 2.5), ("a", "b", "c"))
print("constant group ->", group_advantages(flat))

# Batches are just independent groups keyed by sample id.
print("\nbatch:", batch_advantages([group, flat]))
