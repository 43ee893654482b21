"""Tumbling-window segmentation of raw sensor and location streams.

Windows are ``[origin + k*delta, origin + (k+1)*delta)``. Only windows that
received at least one sample are kept. Binary activations aggregate with
``max``; locations aggregate into the bounding box of the window's points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from .errors import GridMismatch, InvalidDelta, NoData
from .model import BBox, LocationSample, SensorSample


@dataclass
class SegmentedSensorStream:
    sensor_id: str
    delta_ms: int
    origin: int
    steps: Dict[int, float] = field(default_factory=dict)

    def start_ms(self, k: int) -> int:
        return self.origin + k * self.delta_ms

    @property
    def activated_steps(self) -> List[int]:
        return [k for k, v in self.steps.items() if v > 0]

    @property
    def activation_count(self) -> int:
        return sum(1 for v in self.steps.values() if v > 0)


@dataclass
class SegmentedLocationStream:
    user_id: str
    delta_ms: int
    origin: int
    steps: Dict[int, BBox] = field(default_factory=dict)

    def start_ms(self, k: int) -> int:
        return self.origin + k * self.delta_ms


def _check_delta(delta_ms):
    if not isinstance(delta_ms, int) or isinstance(delta_ms, bool) or delta_ms <= 0:
        raise InvalidDelta(f"delta must be a positive integer of ms, got {delta_ms!r}")


def step_of(t: int, delta_ms: int, origin: int) -> int:
    return (t - origin) // delta_ms


def _single_id(samples, attr):
    ids = {getattr(s, attr) for s in samples}
    if len(ids) > 1:
        raise ValueError(f"expected samples of one stream, got {attr}s {sorted(ids)}")
    return ids.pop() if ids else ""


def segment_binary(
    stream: Sequence[SensorSample], delta_ms: int, origin: int
) -> SegmentedSensorStream:
    _check_delta(delta_ms)
    out = SegmentedSensorStream(_single_id(stream, "sensor_id"), delta_ms, origin)
    ordered = sorted(stream, key=lambda s: s.t)
    for k, group in itertools.groupby(ordered, key=lambda s: (s.t - origin) // delta_ms):
        out.steps[k] = max(s.value for s in group)
    return out


def segment_location(
    stream: Sequence[LocationSample], delta_ms: int, origin: int
) -> SegmentedLocationStream:
    _check_delta(delta_ms)
    out = SegmentedLocationStream(_single_id(stream, "user_id"), delta_ms, origin)
    ordered = sorted(stream, key=lambda s: s.t)
    for k, group in itertools.groupby(ordered, key=lambda s: (s.t - origin) // delta_ms):
        x_min = y_min = float("inf")
        x_max = y_max = float("-inf")
        for s in group:
            if s.x < x_min:
                x_min = s.x
            if s.x > x_max:
                x_max = s.x
            if s.y < y_min:
                y_min = s.y
            if s.y > y_max:
                y_max = s.y
        out.steps[k] = BBox(x_min, y_min, x_max, y_max)
    return out


def common_origin(streams: Iterable[Iterable], delta_ms: int) -> int:
    """Floor the earliest timestamp of all streams to the window grid."""
    _check_delta(delta_ms)
    earliest = None
    for stream in streams:
        for s in stream:
            if earliest is None or s.t < earliest:
                earliest = s.t
    if earliest is None:
        raise NoData("no samples in any stream; cannot anchor the window grid")
    return (earliest // delta_ms) * delta_ms


def _group(samples, attr):
    groups: Dict[str, list] = {}
    for s in samples:
        groups.setdefault(getattr(s, attr), []).append(s)
    return groups


def segment_sensors(
    samples: Iterable[SensorSample], delta_ms: int, origin: int
) -> Dict[str, SegmentedSensorStream]:
    groups = _group(samples, "sensor_id")
    return {sid: segment_binary(groups[sid], delta_ms, origin) for sid in sorted(groups)}


def segment_locations(
    samples: Iterable[LocationSample], delta_ms: int, origin: int
) -> Dict[str, SegmentedLocationStream]:
    groups = _group(samples, "user_id")
    return {uid: segment_location(groups[uid], delta_ms, origin) for uid in sorted(groups)}


def shared_grid(streams) -> Optional[tuple]:
    """Return the common ``(delta_ms, origin)`` of segmented streams, or None if empty."""
    grids = {(s.delta_ms, s.origin) for s in streams}
    if len(grids) > 1:
        raise GridMismatch(f"streams use different grids: {sorted(grids)}")
    return grids.pop() if grids else None
