"""Domain types and axis-aligned box geometry.

Timestamps are integer milliseconds since the Unix epoch, coordinates are
metres. All types are immutable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Tuple, Union

from .errors import DegreeOutOfRange, InvalidBox

Point = Tuple[float, float]

#: Owner label for activations no tracked user can be related to.
OTHERS = "others"


class Policy(str, enum.Enum):
    MULTIPLE = "multiple"
    EXCLUSIVE = "exclusive"


@dataclass(frozen=True)
class SensorSample:
    sensor_id: str
    value: float
    t: int

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"sensor value {self.value!r} outside [0, 1]")


@dataclass(frozen=True)
class LocationSample:
    user_id: str
    x: float
    y: float
    t: int

    @property
    def point(self) -> Point:
        return (self.x, self.y)


RawRecord = Union[SensorSample, LocationSample]


@dataclass(frozen=True)
class BBox:
    """Closed axis-aligned box. Zero width and/or height is allowed."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise InvalidBox(
                f"inverted box [{self.x_min}, {self.y_min}, {self.x_max}, {self.y_max}]"
            )

    @classmethod
    def from_points(cls, points) -> "BBox":
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        return cls(min(xs), min(ys), max(xs), max(ys))

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def as_list(self):
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class InteractionArea:
    box: BBox
    degree: float
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.degree <= 1.0:
            raise DegreeOutOfRange(f"degree {self.degree!r} outside [0, 1]")


@dataclass(frozen=True)
class SensorModel:
    sensor_id: str
    areas: Tuple[InteractionArea, ...]
    policy: Policy = Policy.MULTIPLE

    def __post_init__(self):
        object.__setattr__(self, "areas", tuple(self.areas))
        object.__setattr__(self, "policy", Policy(self.policy))
        if not self.areas:
            raise ValueError(f"sensor {self.sensor_id!r} has no interaction areas")


def bbox_area(a: BBox) -> float:
    return (a.x_max - a.x_min) * (a.y_max - a.y_min)


def _overlap(lo1, hi1, lo2, hi2):
    return max(0.0, min(hi1, hi2) - max(lo1, lo2))


def bbox_intersection_area(a: BBox, b: BBox) -> float:
    """Overlap area of two boxes; touching boxes give 0."""
    return _overlap(a.x_min, a.x_max, b.x_min, b.x_max) * _overlap(
        a.y_min, a.y_max, b.y_min, b.y_max
    )


def bbox_contains_point(a: BBox, p: Point) -> bool:
    return a.x_min <= p[0] <= a.x_max and a.y_min <= p[1] <= a.y_max


def bbox_contains(outer: BBox, inner: BBox) -> bool:
    return (
        outer.x_min <= inner.x_min
        and outer.y_min <= inner.y_min
        and inner.x_max <= outer.x_max
        and inner.y_max <= outer.y_max
    )
