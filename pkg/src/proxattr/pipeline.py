"""End-to-end attribution: segment, score interactions, discriminate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .discrimination import AttributionRecord, discriminate
from .interaction import DEFAULT_AGGREGATOR, Aggregator, DegreeMatrix, degree_matrix
from .model import LocationSample, SensorModel, SensorSample
from .segmentation import (
    SegmentedLocationStream,
    SegmentedSensorStream,
    common_origin,
    segment_locations,
    segment_sensors,
)


@dataclass
class PipelineResult:
    delta_ms: int
    origin: Optional[int]
    sensors: Dict[str, SegmentedSensorStream]
    locations: Dict[str, SegmentedLocationStream]
    matrix: DegreeMatrix
    records: List[AttributionRecord]

    @property
    def users(self):
        return tuple(sorted(self.locations))


def run_pipeline(
    sensor_samples: Sequence[SensorSample],
    location_samples: Sequence[LocationSample],
    models: Sequence[SensorModel],
    delta_ms: int,
    origin: Optional[int] = None,
    agg: Aggregator = DEFAULT_AGGREGATOR,
) -> PipelineResult:
    if origin is None:
        if not sensor_samples and not location_samples:
            return PipelineResult(delta_ms, None, {}, {}, DegreeMatrix(None, None), [])
        origin = common_origin([sensor_samples, location_samples], delta_ms)
    sensors = segment_sensors(sensor_samples, delta_ms, origin)
    locations = segment_locations(location_samples, delta_ms, origin)
    matrix = degree_matrix(models, locations, agg)
    records = discriminate(models, sensors, matrix, users=sorted(locations))
    return PipelineResult(delta_ms, origin, sensors, locations, matrix, records)
