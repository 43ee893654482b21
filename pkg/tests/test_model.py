import numpy as np
import pytest
from hypothesis import given

from proxattr.errors import DegreeOutOfRange, InvalidBox
from proxattr.model import (
    BBox,
    InteractionArea,
    SensorModel,
    SensorSample,
    bbox_area,
    bbox_contains_point,
    bbox_intersection_area,
)

from .strategies import any_box


def monte_carlo_overlap(a, b, n=1_000_000, seed=0):
    """Estimate |a ∩ b| by sampling uniformly inside ``a``."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(a.x_min, a.x_max, n)
    ys = rng.uniform(a.y_min, a.y_max, n)
    inside = (xs >= b.x_min) & (xs <= b.x_max) & (ys >= b.y_min) & (ys <= b.y_max)
    return inside.mean() * bbox_area(a)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (BBox(0, 0, 2, 2), BBox(1, 1, 3, 3), 1.0),
        (BBox(0, 0, 1, 1), BBox(5, 5, 6, 6), 0.0),
        (BBox(0, 0, 1, 1), BBox(1, 0, 2, 1), 0.0),  # touching edge
    ],
)
def test_intersection_area(a, b, expected):
    assert bbox_intersection_area(a, b) == expected
    assert bbox_intersection_area(b, a) == expected


def test_intersection_area_against_sampling():
    a, b = BBox(0, 0, 4, 4), BBox(1, 1, 2, 3)
    estimate = monte_carlo_overlap(a, b)
    assert estimate == pytest.approx(2.0, abs=1e-2)
    assert bbox_intersection_area(a, b) == pytest.approx(estimate, abs=1e-2)


@pytest.mark.parametrize(
    "box, area",
    [(BBox(0, 0, 3, 2), 6.0), (BBox(1, 1, 1, 1), 0.0), (BBox(0, 0, 0.5, 4), 2.0)],
)
def test_bbox_area(box, area):
    assert bbox_area(box) == area


@pytest.mark.parametrize("p, inside", [((1, 1), True), ((2, 2), True), ((3, 0), False), ((0, -1e-9), False)])
def test_contains_point_closed(p, inside):
    assert bbox_contains_point(BBox(0, 0, 2, 2), p) is inside


def test_inverted_box_rejected():
    with pytest.raises(InvalidBox):
        BBox(2, 0, 1, 1)


def test_area_and_sample_validation():
    with pytest.raises(DegreeOutOfRange):
        InteractionArea(BBox(0, 0, 1, 1), 1.5)
    with pytest.raises(ValueError):
        SensorSample("fridge", 2.0, 0)
    with pytest.raises(ValueError):
        SensorModel("fridge", ())


@given(any_box, any_box)
def test_intersection_bounded_and_commutative(a, b):
    inter = bbox_intersection_area(a, b)
    assert 0 <= inter <= min(bbox_area(a), bbox_area(b))
    assert inter == bbox_intersection_area(b, a)


@given(any_box)
def test_self_intersection_is_area(a):
    assert bbox_intersection_area(a, a) == bbox_area(a)
