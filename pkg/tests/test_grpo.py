import math
import random

import numpy as np
import pytest

from groundscore.errors import DuplicateSampleId, NonFiniteReward
from groundscore.grpo import RolloutGroup, batch_advantages, group_advantages

from oracles import two_pass_advantages


def group(rewards, sample_id="s"):
    ids = tuple(f"r{i}" for i in range(len(rewards)))
    return RolloutGroup(sample_id=sample_id, rewards=tuple(rewards), rollout_ids=ids)


class TestRolloutGroup:
    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            group([])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            RolloutGroup("s", (1.0, 2.0), ("a",))

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(NonFiniteReward):
            group([1.0, bad])


class TestGroupAdvantages:
    def test_constant_rewards_give_zeros(self):
        assert group_advantages(group([1, 1, 1, 1])) == [0.0, 0.0, 0.0, 0.0]

    def test_two_point_group(self):
        # mean 1, population std 1; eps is negligible
        adv = group_advantages(group([0, 2]), eps=1e-12)
        assert adv == pytest.approx([-1.0, 1.0], abs=1e-9)

    def test_worked_example(self):
        adv = group_advantages(group([1, 2, 3]), eps=1e-8)
        expected = two_pass_advantages([1, 2, 3], 1e-8)
        assert adv == pytest.approx(expected, abs=1e-12)
        assert adv[0] == pytest.approx(-1.2247, abs=1e-4)
        assert adv[2] == pytest.approx(1.2247, abs=1e-4)

    def test_single_rollout_group(self):
        assert group_advantages(group([5.0])) == [0.0]

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            group_advantages(group([1, 2]), eps=0.0)

    def test_zero_mean(self):
        rng = random.Random(3)
        for _ in range(200):
            rewards = [rng.uniform(-10, 10) for _ in range(rng.randrange(1, 33))]
            adv = group_advantages(group(rewards))
            assert abs(sum(adv) / len(adv)) <= 1e-9

    def test_unit_scale(self):
        rng = random.Random(5)
        for _ in range(200):
            rewards = [rng.uniform(-5, 5) for _ in range(rng.randrange(2, 33))]
            std = float(np.std(rewards))
            if std == 0.0:
                continue
            adv = group_advantages(group(rewards), eps=1e-9 * std)
            assert 1 - 1e-6 <= float(np.std(adv)) <= 1.0

    def test_shift_invariance(self):
        rng = random.Random(7)
        for _ in range(100):
            rewards = [rng.uniform(-5, 5) for _ in range(8)]
            shift = rng.uniform(-100, 100)
            base = group_advantages(group(rewards))
            shifted = group_advantages(group([r + shift for r in rewards]))
            assert shifted == pytest.approx(base, abs=1e-9)

    def test_positive_scale_preserves_order_and_sign(self):
        rng = random.Random(9)
        for _ in range(100):
            rewards = [rng.uniform(-5, 5) for _ in range(6)]
            scale = rng.uniform(0.01, 50)
            base = group_advantages(group(rewards))
            scaled = group_advantages(group([r * scale for r in rewards]))
            assert [math.copysign(1, a) if a else 0 for a in base] == [
                math.copysign(1, a) if a else 0 for a in scaled
            ]
            assert np.argsort(base).tolist() == np.argsort(scaled).tolist()

    def test_matches_two_pass_oracle(self):
        rng = random.Random(11)
        for _ in range(300):
            rewards = [rng.uniform(-10, 10) for _ in range(rng.randrange(1, 17))]
            adv = group_advantages(group(rewards), eps=1e-8)
            assert adv == pytest.approx(
                two_pass_advantages(rewards, 1e-8), abs=1e-12
            )


class TestBatchAdvantages:
    def test_singleton_batch(self):
        g = group([0, 2], sample_id="only")
        assert batch_advantages([g]) == {"only": group_advantages(g)}

    def test_groups_are_independent(self):
        g1 = group([0, 2], sample_id="a")
        g2 = group([5, 5, 8], sample_id="b")
        combined = batch_advantages([g1, g2])
        assert combined["a"] == group_advantages(g1)
        assert combined["b"] == group_advantages(g2)

    def test_empty_batch(self):
        assert batch_advantages([]) == {}

    def test_duplicate_sample_id_rejected(self):
        with pytest.raises(DuplicateSampleId):
            batch_advantages([group([1], "x"), group([2], "x")])
