import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groundscore.errors import InvalidBox
from groundscore.geometry import BoundingBox, area, iou

from oracles import cell_count_iou


def random_int_box(rng, extent=64):
    x1, x2 = sorted(rng.randrange(extent + 1) for _ in range(2))
    y1, y2 = sorted(rng.randrange(extent + 1) for _ in range(2))
    return BoundingBox(x1, y1, x2, y2)


finite_coord = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)


@st.composite
def boxes(draw):
    x1, x2 = sorted((draw(finite_coord), draw(finite_coord)))
    y1, y2 = sorted((draw(finite_coord), draw(finite_coord)))
    return BoundingBox(x1, y1, x2, y2)


class TestBoundingBox:
    def test_rejects_inverted_x(self):
        with pytest.raises(InvalidBox):
            BoundingBox(5, 5, 1, 9)

    def test_rejects_inverted_y(self):
        with pytest.raises(InvalidBox):
            BoundingBox(5, 5, 9, 1)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(InvalidBox):
            BoundingBox(0, 0, bad, 10)

    def test_rejects_non_numeric(self):
        with pytest.raises(InvalidBox):
            BoundingBox(0, 0, "ten", 10)

    def test_zero_area_box_allowed(self):
        b = BoundingBox(5, 5, 5, 9)
        assert area(b) == 0


class TestArea:
    @pytest.mark.parametrize(
        "coords,expected",
        [((0, 0, 10, 10), 100), ((5, 5, 5, 9), 0), ((0, 0, 3, 7), 21)],
    )
    def test_examples(self, coords, expected):
        assert area(BoundingBox(*coords)) == expected


class TestIou:
    def test_identical_boxes(self):
        b = BoundingBox(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint_boxes(self):
        assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)) == 0.0

    def test_partial_overlap(self):
        # intersection 1, union 4 + 4 - 1 = 7; matches the cell oracle
        a, b = BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 3, 3)
        assert iou(a, b) == pytest.approx(1 / 7, abs=0)
        assert iou(a, b) == cell_count_iou(a, b)

    def test_two_degenerate_boxes_score_zero(self):
        a = BoundingBox(3, 3, 3, 3)
        assert iou(a, a) == 0.0
        assert iou(a, BoundingBox(3, 1, 3, 8)) == 0.0

    def test_touching_boxes_score_zero(self):
        assert iou(BoundingBox(0, 0, 1, 1), BoundingBox(1, 0, 2, 1)) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(boxes(), boxes())
    def test_symmetry_and_bounds(self, a, b):
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0
        assert math.isfinite(v)

    @settings(max_examples=200, deadline=None)
    @given(boxes())
    def test_identity(self, b):
        if area(b) > 0:
            assert iou(b, b) == 1.0

    def test_containment(self):
        rng = random.Random(7)
        for _ in range(200):
            outer = random_int_box(rng)
            if area(outer) == 0:
                continue
            # inner box nested inside outer
            x1 = rng.uniform(outer.x1, outer.x2)
            x2 = rng.uniform(x1, outer.x2)
            y1 = rng.uniform(outer.y1, outer.y2)
            y2 = rng.uniform(y1, outer.y2)
            inner = BoundingBox(x1, y1, x2, y2)
            if area(inner) == 0:
                continue
            expected = area(inner) / area(outer)
            assert iou(inner, outer) == pytest.approx(expected, rel=1e-12)

    def test_matches_cell_count_oracle_on_integer_boxes(self):
        rng = random.Random(123)
        for _ in range(2000):
            a, b = random_int_box(rng), random_int_box(rng)
            assert iou(a, b) == cell_count_iou(a, b)
