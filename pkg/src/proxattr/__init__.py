"""Proximity-based attribution of binary-sensor activations in multi-occupancy homes."""

from .discrimination import AttributionRecord, attribute_exclusive, attribute_multiple, discriminate, exclusive_owner
from .ingest import AreaConfig, load_area_config, parse_location_csv, parse_sensor_csv, replay_ndjson
from .interaction import (
    Aggregator,
    DegreeMatrix,
    area_term,
    degree_matrix,
    jaccard_user,
    sensor_interaction_degree,
)
from .model import (
    OTHERS,
    BBox,
    InteractionArea,
    LocationSample,
    Policy,
    SensorModel,
    SensorSample,
    bbox_area,
    bbox_contains_point,
    bbox_intersection_area,
)
from .pipeline import PipelineResult, run_pipeline
from .segmentation import common_origin, segment_binary, segment_location

__version__ = "0.1.0"
