"""Synthetic multi-occupancy scenarios with ground truth, plus a reference oracle.

Layout: the room is split into one vertical strip ("zone") per tracked user,
with ``min_separation_m`` of empty floor between neighbouring zones. Each
sensor gets a square area of degree 1 inside one zone plus a room-wide area of
degree 0. Users walk random waypoints inside their zone; some waypoints are
sensor areas where the user dwells and opens/closes the appliance. With
``roam > 0`` users may pick waypoints anywhere, and untracked actors (labelled
``others`` in the truth) roam the whole room.
"""

from __future__ import annotations

import bisect
import math
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .discrimination import AttributionRecord
from .errors import InfeasibleLayout, UnknownSensor
from .interaction import DEFAULT_AGGREGATOR, Aggregator
from .model import (
    OTHERS,
    BBox,
    InteractionArea,
    LocationSample,
    Policy,
    SensorModel,
    SensorSample,
)

SENSOR_NAMES = (
    "cutlery", "dishwasher", "fridge", "microwave", "oven",
    "pantry", "sink", "kettle", "toaster", "freezer",
)
AREA_GAP_M = 0.2


@dataclass(frozen=True)
class TruthEvent:
    sensor_id: str
    t: int
    actor: str


@dataclass
class Scenario:
    seed: int
    room: BBox
    users: Tuple[str, ...]
    layout: Tuple[SensorModel, ...]
    locations: List[LocationSample]
    sensors: List[SensorSample]
    truth: List[TruthEvent]

    @property
    def n_events(self) -> int:
        return len(self.locations) + len(self.sensors)


def _user_ids(n):
    ids = []
    for i in range(n):
        name, q = "", i
        while True:
            name = chr(ord("A") + q % 26) + name
            q = q // 26 - 1
            if q < 0:
                break
        ids.append(name)
    return ids


def _sensor_ids(n):
    return [SENSOR_NAMES[i] if i < len(SENSOR_NAMES) else f"sensor{i:02d}" for i in range(n)]


def _layout(rng, room, n_users, sensor_ids, area_size, min_separation_m):
    width, height = room.width, room.height
    zone_w = (width - (n_users - 1) * min_separation_m) / n_users
    if zone_w <= area_size + 2 * AREA_GAP_M:
        raise InfeasibleLayout(
            f"{n_users} zones separated by {min_separation_m} m do not fit a {width} m wide room"
        )
    zones = []
    for z in range(n_users):
        x0 = room.x_min + z * (zone_w + min_separation_m)
        zones.append(BBox(x0, room.y_min, x0 + zone_w, room.y_max))

    pitch = area_size + AREA_GAP_M
    cols = int((zone_w - AREA_GAP_M) // pitch)
    rows = int((height - AREA_GAP_M) // pitch)
    per_zone: Dict[int, List[str]] = {z: [] for z in range(n_users)}
    for i, sid in enumerate(sensor_ids):
        per_zone[i % n_users].append(sid)
    if max(len(v) for v in per_zone.values()) > cols * rows:
        raise InfeasibleLayout(
            f"zone of {zone_w:.2f} x {height:.2f} m cannot hold "
            f"{max(len(v) for v in per_zone.values())} areas of {area_size} m"
        )

    models, zone_of = [], {}
    for z, sids in per_zone.items():
        cells = rng.sample(range(cols * rows), len(sids))
        for sid, cell in zip(sids, cells):
            cx, cy = divmod(cell, rows)
            x0 = zones[z].x_min + AREA_GAP_M + cx * pitch
            y0 = zones[z].y_min + AREA_GAP_M + cy * pitch
            inner = InteractionArea(BBox(x0, y0, x0 + area_size, y0 + area_size), 1.0, sid)
            other = InteractionArea(room, 0.0, "other")
            policy = rng.choice([Policy.MULTIPLE, Policy.EXCLUSIVE])
            models.append(SensorModel(sid, (inner, other), policy))
            zone_of[sid] = z
    models.sort(key=lambda m: sensor_ids.index(m.sensor_id))
    return zones, models, zone_of


def _uniform_in(rng, box, margin=0.0):
    return (
        rng.uniform(box.x_min + margin, box.x_max - margin),
        rng.uniform(box.y_min + margin, box.y_max - margin),
    )


def _walk(rng, home, room, visits, roam, visit_prob, start_ms, duration_ms, rate_hz, all_visits):
    """Simulate one actor.

    Returns ``(track, events)``: the true position at every tick and
    ``(sensor_id, t, value, position)`` for each open/close it performs.
    """
    dt_ms = 1000 // rate_hz
    n_ticks = duration_ms // dt_ms
    # events stay strictly before the last tick so their window holds a fix
    last_tick = start_ms + (n_ticks - 1) * dt_ms
    pos = _uniform_in(rng, home)
    speed = rng.uniform(0.5, 1.2)
    dwell_until = start_ms
    track, events = [], []

    def pick():
        anywhere = roam > 0 and rng.random() < roam
        pool = all_visits if anywhere else visits
        if pool and rng.random() < visit_prob:
            sid, box = rng.choice(pool)
            return _uniform_in(rng, box, 0.1 * box.width), sid
        return _uniform_in(rng, room if anywhere else home), None

    target, target_sensor = pick()
    for i in range(n_ticks):
        t = start_ms + i * dt_ms
        if t >= dwell_until:
            dx, dy = target[0] - pos[0], target[1] - pos[1]
            dist = math.hypot(dx, dy)
            step = speed * dt_ms / 1000.0
            if dist <= step:
                pos = target
                dwell_ms = rng.randint(3000, 12000)
                dwell_until = t + dwell_ms
                if target_sensor is not None:
                    t_open = t + rng.randint(200, 1500)
                    t_close = t + dwell_ms - rng.randint(200, 1000)
                    for te, v in ((t_open, 1.0), (t_close, 0.0)):
                        if te < last_tick and te >= t_open:
                            events.append((target_sensor, te, v, pos))
                target, target_sensor = pick()
                speed = rng.uniform(0.5, 1.2)
            else:
                pos = (pos[0] + dx / dist * step, pos[1] + dy / dist * step)
        track.append((t, pos))
    return track, events


def generate_scenario(
    seed: int,
    n_users: int,
    n_sensors: int,
    duration_ms: int,
    noise_m: float = 0.0,
    min_separation_m: float = 1.5,
    *,
    room: Tuple[float, float] = (8.0, 5.0),
    area_size: float = 0.8,
    rate_hz: int = 10,
    roam: float = 0.0,
    n_untracked: int = 0,
    visit_prob: float = 0.5,
    start_ms: Optional[int] = None,
) -> Scenario:
    if n_users < 1:
        raise ValueError("n_users must be >= 1")
    if n_sensors < 0 or duration_ms <= 0 or noise_m < 0 or rate_hz <= 0:
        raise ValueError("n_sensors >= 0, duration_ms > 0, noise_m >= 0 and rate_hz > 0 required")
    rng = random.Random(seed)
    room_box = BBox(0.0, 0.0, float(room[0]), float(room[1]))
    users = _user_ids(n_users)
    sensor_ids = _sensor_ids(n_sensors)
    zones, models, zone_of = _layout(rng, room_box, n_users, sensor_ids, area_size, min_separation_m)
    if start_ms is None:
        start_ms = 1_700_000_000_000 + rng.randrange(60_000)

    inner = {m.sensor_id: m.areas[0].box for m in models}
    all_visits = [(sid, inner[sid]) for sid in sensor_ids]

    locations, raw_events = [], []
    for z, uid in enumerate(users):
        visits = [(sid, inner[sid]) for sid in sensor_ids if zone_of[sid] == z]
        track, events = _walk(
            rng, zones[z], room_box, visits, roam, visit_prob, start_ms, duration_ms, rate_hz, all_visits
        )
        for t, (x, y) in track:
            if noise_m > 0:
                r = noise_m * math.sqrt(rng.random())
                a = rng.uniform(0.0, 2.0 * math.pi)
                x, y = x + r * math.cos(a), y + r * math.sin(a)
            locations.append(LocationSample(uid, x, y, t))
        raw_events.extend((sid, t, v, uid, p) for sid, t, v, p in events)
    for _ in range(n_untracked):
        _, events = _walk(
            rng, room_box, room_box, all_visits, 1.0, visit_prob, start_ms, duration_ms, rate_hz, all_visits
        )
        raw_events.extend((sid, t, v, OTHERS, p) for sid, t, v, p in events)

    raw_events.sort(key=lambda e: (e[1], e[0], e[3]))
    for sid, t, v, actor, p in raw_events:
        box = inner[sid]
        assert box.x_min <= p[0] <= box.x_max and box.y_min <= p[1] <= box.y_max
    locations.sort(key=lambda s: (s.t, s.user_id))
    return Scenario(
        seed=seed,
        room=room_box,
        users=tuple(users),
        layout=tuple(models),
        locations=locations,
        sensors=[SensorSample(sid, v, t) for sid, t, v, _, _ in raw_events],
        truth=[TruthEvent(sid, t, actor) for sid, t, _, actor, _ in raw_events],
    )


# -- reference oracle --------------------------------------------------------


def _oracle_ratio(area, u):
    x0, y0, x1, y1 = area
    ux0, uy0, ux1, uy1 = u
    w = max(0.0, min(x1, ux1) - max(x0, ux0))
    h = max(0.0, min(y1, uy1) - max(y0, uy0))
    user_w, user_h = ux1 - ux0, uy1 - uy0
    if user_w * user_h > 0:
        return min(1.0, (w * h) / (user_w * user_h))
    x_in = x0 <= ux0 <= x1
    y_in = y0 <= uy0 <= y1
    if user_w > 0:
        return w / user_w if y_in else 0.0
    if user_h > 0:
        return h / user_h if x_in else 0.0
    return 1.0 if (x_in and y_in) else 0.0


def _oracle_degree(model, u, agg):
    terms = [a.degree * _oracle_ratio(a.box.as_list(), u) for a in model.areas]
    if agg is Aggregator.MAX:
        return max(terms)
    if agg is Aggregator.LUKASIEWICZ_TCONORM:
        acc = 0.0
        for x in terms:
            acc = min(1.0, acc + x)
        return acc
    acc = terms[0]
    for x in terms[1:]:
        acc = min(1.0, 1.0 - acc + x)
    return acc


def oracle_attribute(
    scenario: Scenario, delta_ms: int, agg: Aggregator = DEFAULT_AGGREGATOR
) -> List[AttributionRecord]:
    """Attribution computed by walking every window of the scenario explicitly."""
    agg = Aggregator(agg)
    stamps = [s.t for s in scenario.sensors] + [s.t for s in scenario.locations]
    if not stamps:
        return []
    origin = min(stamps) - min(stamps) % delta_ms
    n_windows = (max(stamps) - origin) // delta_ms + 1
    models = {m.sensor_id: m for m in scenario.layout}

    def by_key(samples, key):
        out = {}
        for s in sorted(samples, key=lambda s: s.t):
            out.setdefault(key(s), []).append(s)
        return {k: (v, [s.t for s in v]) for k, v in out.items()}

    sensor_streams = by_key(scenario.sensors, lambda s: s.sensor_id)
    user_streams = by_key(scenario.locations, lambda s: s.user_id)
    for sid in sensor_streams:
        if sid not in models:
            raise UnknownSensor(f"sensor {sid!r} missing from layout")
    users = sorted(user_streams)

    records = []
    for w in range(n_windows):
        lo, hi = origin + w * delta_ms, origin + (w + 1) * delta_ms
        boxes = {}
        for uid in users:
            samples, ts = user_streams[uid]
            pts = samples[bisect.bisect_left(ts, lo):bisect.bisect_left(ts, hi)]
            if pts:
                boxes[uid] = (
                    min(p.x for p in pts), min(p.y for p in pts),
                    max(p.x for p in pts), max(p.y for p in pts),
                )
        for sid in sorted(sensor_streams):
            samples, ts = sensor_streams[sid]
            window = samples[bisect.bisect_left(ts, lo):bisect.bisect_left(ts, hi)]
            if not window:
                continue
            activation = max(s.value for s in window)
            if not activation > 0:
                continue
            model = models[sid]
            degrees = {
                uid: (_oracle_degree(model, boxes[uid], agg) if uid in boxes else 0.0) for uid in users
            }
            top = max(degrees.values(), default=0.0)
            leaders = [uid for uid in users if top > 0 and degrees[uid] == top]
            owner = leaders[0] if leaders else OTHERS
            if model.policy is Policy.EXCLUSIVE:
                attributed = {uid: (degrees[uid] if uid == owner else 0.0) for uid in users}
            else:
                attributed = dict(degrees)
            records.append(
                AttributionRecord(
                    step=w,
                    start_ms=lo,
                    end_ms=hi,
                    sensor_id=sid,
                    policy=model.policy,
                    activation=activation,
                    degrees=degrees,
                    attributed=attributed,
                    exclusive_owner=owner,
                    tie=len(leaders) > 1,
                )
            )
    return records


def attribute_scenario(scenario: Scenario, delta_ms: int, agg: Aggregator = DEFAULT_AGGREGATOR):
    from .pipeline import run_pipeline

    return run_pipeline(scenario.sensors, scenario.locations, scenario.layout, delta_ms, agg=agg)


# -- scoring -----------------------------------------------------------------


@dataclass
class ScoreReport:
    confusion: Dict[str, Counter] = field(default_factory=dict)
    excluded: int = 0

    @property
    def total(self) -> int:
        return sum(sum(c.values()) for c in self.confusion.values())

    @property
    def correct(self) -> int:
        return sum(n for c in self.confusion.values() for (t, p), n in c.items() if t == p)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 1.0

    def to_dict(self) -> dict:
        per_sensor = {}
        for sid in sorted(self.confusion):
            c = self.confusion[sid]
            per_sensor[sid] = {
                "total": sum(c.values()),
                "correct": sum(n for (t, p), n in c.items() if t == p),
                "confusion": [
                    {"truth": t, "predicted": p, "count": n} for (t, p), n in sorted(c.items())
                ],
            }
        return {
            "accuracy": self.accuracy,
            "correct": self.correct,
            "total": self.total,
            "excluded": self.excluded,
            "per_sensor": per_sensor,
        }


def score(
    records: Sequence[AttributionRecord], truth: Sequence[TruthEvent], strict: bool = False
) -> ScoreReport:
    """Compare each record's owner with the actor of the earliest truth event in its window.

    With ``strict`` windows holding events from several actors are excluded
    instead of being scored against the earliest one.
    """
    by_sensor: Dict[str, list] = {}
    for e in sorted(truth, key=lambda e: e.t):
        by_sensor.setdefault(e.sensor_id, []).append(e)
    stamps = {sid: [e.t for e in evs] for sid, evs in by_sensor.items()}

    report = ScoreReport()
    for rec in records:
        if rec.sensor_id not in by_sensor:
            raise UnknownSensor(f"sensor {rec.sensor_id!r} has no truth events")
        evs, ts = by_sensor[rec.sensor_id], stamps[rec.sensor_id]
        window = evs[bisect.bisect_left(ts, rec.start_ms):bisect.bisect_left(ts, rec.end_ms)]
        actors = {e.actor for e in window}
        if strict and len(actors) > 1:
            report.excluded += 1
            continue
        actual = window[0].actor if window else "<none>"
        report.confusion.setdefault(rec.sensor_id, Counter())[(actual, rec.exclusive_owner)] += 1
    return report


def write_scenario(scenario: Scenario, out_dir, delta_ms: int = 15000) -> Dict[str, str]:
    from .ingest import AreaConfig, write_area_config, write_location_csv, write_sensor_csv, write_truth_csv

    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "locations": os.path.join(out_dir, "locations.csv"),
        "sensors": os.path.join(out_dir, "sensors.csv"),
        "truth": os.path.join(out_dir, "truth.csv"),
        "config": os.path.join(out_dir, "areas.json"),
    }
    write_location_csv(scenario.locations, paths["locations"])
    write_sensor_csv(scenario.sensors, paths["sensors"])
    write_truth_csv(scenario.truth, paths["truth"])
    write_area_config(AreaConfig(scenario.layout, delta_ms), paths["config"])
    return paths
