from hypothesis import strategies as st

from proxattr.model import BBox, InteractionArea, LocationSample, Policy, SensorModel, SensorSample

coord = st.floats(min_value=-20, max_value=20, allow_nan=False, allow_infinity=False)
degree = st.floats(min_value=0, max_value=1)


@st.composite
def boxes(draw, lo=coord, hi=None):
    hi = hi or lo
    x0, x1 = sorted((draw(lo), draw(hi)))
    y0, y1 = sorted((draw(lo), draw(hi)))
    return BBox(x0, y0, x1, y1)


# mix of genuine rectangles, segments and points
any_box = st.one_of(
    boxes(),
    coord.flatmap(lambda x: boxes().map(lambda b: BBox(x, b.y_min, x, b.y_max))),
    coord.flatmap(lambda y: boxes().map(lambda b: BBox(b.x_min, y, b.x_max, y))),
    st.tuples(coord, coord).map(lambda p: BBox(p[0], p[1], p[0], p[1])),
)

areas = st.builds(InteractionArea, any_box, degree, st.just("a"))


@st.composite
def sensor_models(draw, sensor_id=st.sampled_from(["fridge", "cutlery", "oven"])):
    return SensorModel(
        draw(sensor_id),
        tuple(draw(st.lists(areas, min_size=1, max_size=4))),
        draw(st.sampled_from(list(Policy))),
    )


timestamps = st.integers(min_value=0, max_value=200_000)

sensor_samples = st.builds(
    SensorSample, st.sampled_from(["fridge", "cutlery", "oven"]), st.sampled_from([0.0, 1.0]), timestamps
)
location_samples = st.builds(
    LocationSample, st.sampled_from(["A", "B", "C"]), coord, coord, timestamps
)
