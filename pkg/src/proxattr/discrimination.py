"""Per-user attribution of activated time-steps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import UnknownSensor
from .interaction import DegreeMatrix, check_grid
from .model import OTHERS, Policy, SensorModel
from .segmentation import SegmentedSensorStream, shared_grid


@dataclass(frozen=True)
class AttributionRecord:
    step: int
    start_ms: int
    end_ms: int
    sensor_id: str
    policy: Policy
    activation: float
    degrees: Dict[str, float]
    attributed: Dict[str, float]
    exclusive_owner: str
    tie: bool = False


def exclusive_owner(degrees: Mapping[str, float]) -> Tuple[str, bool]:
    """Return ``(owner, tie)``: the user with the highest positive degree.

    Equal maxima go to the lexicographically smallest user id and set ``tie``.
    With no positive degree the owner is :data:`OTHERS`.
    """
    best = max(degrees.values(), default=0.0)
    if best <= 0:
        return OTHERS, False
    winners = sorted(u for u, d in degrees.items() if d == best)
    return winners[0], len(winners) > 1


def attribute_multiple(activation: float, degrees: Mapping[str, float]) -> Dict[str, float]:
    return dict(degrees)


def attribute_exclusive(activation: float, degrees: Mapping[str, float]) -> Dict[str, float]:
    owner, _ = exclusive_owner(degrees)
    return {u: (d if u == owner else 0.0) for u, d in degrees.items()}


_POLICIES = {
    Policy.MULTIPLE: attribute_multiple,
    Policy.EXCLUSIVE: attribute_exclusive,
}


def discriminate(
    models: Sequence[SensorModel],
    sensors: Mapping[str, SegmentedSensorStream],
    matrix: DegreeMatrix,
    users: Optional[Sequence[str]] = None,
) -> List[AttributionRecord]:
    """One record per activated (sensor, step), ordered by ``(step, sensor_id)``.

    ``users`` defaults to the users present in ``matrix``.
    """
    by_id = {m.sensor_id: m for m in models}
    grid = shared_grid(sensors.values())
    if grid is None:
        return []
    delta_ms, origin = grid
    check_grid(matrix, delta_ms, origin)
    users = tuple(sorted(users if users is not None else matrix.users))
    if OTHERS in users:
        raise ValueError(f"user id {OTHERS!r} is reserved")

    records = []
    for sensor_id, stream in sensors.items():
        model = by_id.get(sensor_id)
        if model is None:
            raise UnknownSensor(f"no interaction areas configured for sensor {sensor_id!r}")
        attribute = _POLICIES[model.policy]
        for k, activation in stream.steps.items():
            if activation <= 0:
                continue
            degrees = {u: matrix.get(k, sensor_id, u) for u in users}
            owner, tie = exclusive_owner(degrees)
            start = origin + k * delta_ms
            records.append(
                AttributionRecord(
                    step=k,
                    start_ms=start,
                    end_ms=start + delta_ms,
                    sensor_id=sensor_id,
                    policy=model.policy,
                    activation=activation,
                    degrees=degrees,
                    attributed=attribute(activation, degrees),
                    exclusive_owner=owner,
                    tie=tie,
                )
            )
    records.sort(key=lambda r: (r.step, r.sensor_id))
    return records
