"""Axis-aligned bounding boxes and exact IoU.

Coordinates are continuous pixel values with (x1, y1) the top-left corner and
(x2, y2) the bottom-right corner; area and IoU are closed-form (no discrete
+1 pixel-counting correction). Boxes are never clamped to image bounds here;
that is an ingestion concern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidBox


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned rectangle; zero-area boxes allowed, inverted ones rejected."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        for name in ("x1", "y1", "x2", "y2"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidBox(f"{name} is not a number: {value!r}") from None
            if not math.isfinite(value):
                raise InvalidBox(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise InvalidBox(
                "inverted box: "
                f"({self.x1}, {self.y1}, {self.x2}, {self.y2}) requires x1 <= x2 and y1 <= y2"
            )

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def scaled(self, sx: float, sy: float) -> "BoundingBox":
        """Return a copy with x coordinates scaled by sx and y by sy."""
        return BoundingBox(self.x1 * sx, self.y1 * sy, self.x2 * sx, self.y2 * sy)


def area(b: BoundingBox) -> float:
    """Rectangle area; 0 for degenerate boxes."""
    return (b.x2 - b.x1) * (b.y2 - b.y1)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union in [0, 1].

    A pair of zero-area boxes (union area 0) scores 0 rather than NaN so the
    reward pipeline stays total: degenerate predictions count as misses.
    """
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    union = area(a) + area(b) - inter
    if union <= 0.0:
        return 0.0
    return inter / union
