"""Fuzzy interaction degree between a sensor's areas and a user's window box."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .errors import GridMismatch
from .model import BBox, InteractionArea, SensorModel, bbox_area, bbox_intersection_area
from .segmentation import SegmentedLocationStream, shared_grid


class Aggregator(str, enum.Enum):
    """How the weighted per-area terms of one sensor are merged.

    ``LUKASIEWICZ_TCONORM`` is the bounded sum ``min(1, a + b)``.
    ``PAPER_LITERAL`` folds with ``min(1, 1 - a + b)`` left to right, which is
    the Lukasiewicz implication and depends on area order.
    """

    LUKASIEWICZ_TCONORM = "lukasiewicz-tconorm"
    PAPER_LITERAL = "paper-literal"
    MAX = "max"


DEFAULT_AGGREGATOR = Aggregator.LUKASIEWICZ_TCONORM


def product_tnorm(a: float, b: float) -> float:
    return a * b


def lukasiewicz_tconorm(a: float, b: float) -> float:
    return min(1.0, a + b)


def lukasiewicz_implication(a: float, b: float) -> float:
    return min(1.0, 1.0 - a + b)


def _covered_fraction(lo, hi, area_lo, area_hi):
    # fraction of the interval [lo, hi] inside [area_lo, area_hi]; hi > lo
    return max(0.0, min(hi, area_hi) - max(lo, area_lo)) / (hi - lo)


def jaccard_user(area: InteractionArea, user_box: BBox) -> float:
    """Share of the user's box that lies inside the area box.

    Degenerate user boxes take the limit of the ratio: a point scores 1 when
    contained and 0 otherwise, a segment scores the fraction of its length
    inside the area.
    """
    box = area.box
    user_area = bbox_area(user_box)
    if user_area > 0:
        return min(1.0, bbox_intersection_area(box, user_box) / user_area)
    wide = user_box.x_max > user_box.x_min
    tall = user_box.y_max > user_box.y_min
    if wide:
        if not box.y_min <= user_box.y_min <= box.y_max:
            return 0.0
        return _covered_fraction(user_box.x_min, user_box.x_max, box.x_min, box.x_max)
    if tall:
        if not box.x_min <= user_box.x_min <= box.x_max:
            return 0.0
        return _covered_fraction(user_box.y_min, user_box.y_max, box.y_min, box.y_max)
    inside = (
        box.x_min <= user_box.x_min <= box.x_max
        and box.y_min <= user_box.y_min <= box.y_max
    )
    return 1.0 if inside else 0.0


def area_term(area: InteractionArea, user_box: BBox) -> float:
    return product_tnorm(area.degree, jaccard_user(area, user_box))


def aggregate(terms: Sequence[float], agg: Aggregator = DEFAULT_AGGREGATOR) -> float:
    agg = Aggregator(agg)
    if agg is Aggregator.LUKASIEWICZ_TCONORM:
        return reduce(lukasiewicz_tconorm, terms, 0.0)
    if agg is Aggregator.MAX:
        return max(terms)
    return reduce(lukasiewicz_implication, terms)


def sensor_interaction_degree(
    model: SensorModel, user_box: BBox, agg: Aggregator = DEFAULT_AGGREGATOR
) -> float:
    return aggregate([area_term(a, user_box) for a in model.areas], agg)


@dataclass
class DegreeMatrix:
    """Interaction degrees keyed by ``(step, sensor_id, user_id)``.

    Cells exist only where the user has a location step; :meth:`get` reads
    missing cells as 0.
    """

    delta_ms: Optional[int]
    origin: Optional[int]
    users: Tuple[str, ...] = ()
    cells: Dict[Tuple[int, str, str], float] = field(default_factory=dict)

    def get(self, step: int, sensor_id: str, user_id: str) -> float:
        return self.cells.get((step, sensor_id, user_id), 0.0)

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, key):
        return self.cells[key]

    def __contains__(self, key):
        return key in self.cells


def degree_matrix(
    models: Sequence[SensorModel],
    locations: Mapping[str, SegmentedLocationStream],
    agg: Aggregator = DEFAULT_AGGREGATOR,
) -> DegreeMatrix:
    grid = shared_grid(locations.values())
    delta_ms, origin = grid if grid else (None, None)
    matrix = DegreeMatrix(delta_ms, origin, tuple(sorted(locations)))
    for model in models:
        for user_id in matrix.users:
            for k, box in locations[user_id].steps.items():
                matrix.cells[(k, model.sensor_id, user_id)] = sensor_interaction_degree(
                    model, box, agg
                )
    return matrix


def check_grid(matrix: DegreeMatrix, delta_ms: int, origin: int) -> None:
    if matrix.delta_ms is None:
        return
    if (matrix.delta_ms, matrix.origin) != (delta_ms, origin):
        raise GridMismatch(
            f"degree matrix grid {(matrix.delta_ms, matrix.origin)} "
            f"differs from sensor grid {(delta_ms, origin)}"
        )
