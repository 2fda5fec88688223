"""Group-relative advantage computation for rollout groups.

Each rollout's advantage is its reward standardized against the mean and
population standard deviation of its own group: A_i = (r_i - mean) /
(std + eps). A group with exactly zero variance short-circuits to all-zero
advantages instead of eps-scaled noise. Normalization is strictly per group;
there is no cross-group whitening or clipping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateSampleId, NonFiniteReward

DEFAULT_EPS = 1e-8


@dataclass(frozen=True)
class RolloutGroup:
    """The rewards of all rollouts sampled for one prompt."""

    sample_id: str
    rewards: tuple[float, ...]
    rollout_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "rewards", tuple(float(r) for r in self.rewards))
        object.__setattr__(self, "rollout_ids", tuple(self.rollout_ids))
        if len(self.rewards) == 0:
            raise ValueError(f"group {self.sample_id!r} is empty (G >= 1 required)")
        if len(self.rewards) != len(self.rollout_ids):
            raise ValueError(
                f"group {self.sample_id!r}: {len(self.rewards)} rewards but "
                f"{len(self.rollout_ids)} rollout_ids"
            )
        for r in self.rewards:
            if not math.isfinite(r):
                raise NonFiniteReward(
                    f"group {self.sample_id!r} contains non-finite reward {r!r}"
                )


def group_advantages(group: RolloutGroup, eps: float = DEFAULT_EPS) -> list[float]:
    """Standardized advantages, in rollout order."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    rewards = np.asarray(group.rewards, dtype=np.float64)
    std = float(rewards.std())  # population std
    if std == 0.0:
        return [0.0] * rewards.size
    mean = float(rewards.mean())
    return [float(a) for a in (rewards - mean) / (std + eps)]


def batch_advantages(
    groups: list[RolloutGroup], eps: float = DEFAULT_EPS
) -> dict[str, list[float]]:
    """Per-group advantages keyed by sample_id; groups are independent."""
    out: dict[str, list[float]] = {}
    for group in groups:
        if group.sample_id in out:
            raise DuplicateSampleId(f"duplicate sample_id: {group.sample_id!r}")
        out[group.sample_id] = group_advantages(group, eps)
    return out
