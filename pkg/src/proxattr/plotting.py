"""Matplotlib figures written next to the CSV outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .model import OTHERS  # noqa: E402

STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
}
OTHERS_COLOR = "0.55"


def _colors(names):
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    return {n: cycle[i % len(cycle)] for i, n in enumerate(names)}


def _minutes(t, t0):
    return (t - t0) / 60000.0


def plot_timeline(rows, users, path):
    """Raw activation and per-user attributed degree, one panel per sensor."""
    sensors = sorted({r.sensor_id for r in rows})
    users = sorted(users)
    colors = _colors(users)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(
            max(1, len(sensors)), 1, sharex=True, squeeze=False,
            figsize=(8, 1.2 + 1.1 * max(1, len(sensors))),
        )
        t0 = min((r.step_start_ms for r in rows), default=0)
        for ax, sid in zip(axes[:, 0], sensors):
            mine = [r for r in rows if r.sensor_id == sid]
            xs = [_minutes(r.step_start_ms, t0) for r in mine]
            ax.vlines(xs, 0, [r.raw_activation for r in mine], color=OTHERS_COLOR, lw=0.8, label="raw")
            for i, u in enumerate(users):
                pts = [(x, r.degrees.get(u, 0.0)) for x, r in zip(xs, mine) if r.degrees.get(u, 0.0) > 0]
                if pts:
                    ax.plot(*zip(*pts), "o", ms=3, color=colors[u], label=f"user {u}",
                            alpha=0.85, zorder=3 + i)
            ax.set_ylim(-0.05, 1.1)
            ax.set_ylabel(sid)
        axes[-1, 0].set_xlabel("minutes")
        handles, labels = axes[0, 0].get_legend_handles_labels()
        if handles:
            fig.legend(handles, labels, loc="upper right", ncol=len(labels))
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_counts(table, path):
    rows = table.rows
    colors = _colors(table.users)
    colors[OTHERS] = OTHERS_COLOR
    width = 0.8 / max(1, len(rows))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(1.5 + 1.3 * max(1, len(table.sensors)), 3))
        for i, r in enumerate(rows):
            xs = [j + (i - (len(rows) - 1) / 2) * width for j in range(len(table.sensors))]
            ax.bar(xs, [table.cell(r, s) for s in table.sensors], width, color=colors[r], label=r)
        ax.set_xticks(range(len(table.sensors)))
        ax.set_xticklabels(table.sensors)
        ax.set_ylabel("activated steps")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def plot_segmented(sensors, locations, path):
    """Activated steps per sensor (top) and per-user box extent along x (bottom)."""
    grids = [s for s in list(sensors.values()) + list(locations.values())]
    t0 = min((s.origin for s in grids), default=0)
    with plt.rc_context(STYLE):
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
        for i, sid in enumerate(sorted(sensors)):
            s = sensors[sid]
            xs = [_minutes(s.start_ms(k), t0) for k in sorted(s.activated_steps)]
            top.plot(xs, [i] * len(xs), "|", ms=8)
        top.set_yticks(range(len(sensors)))
        top.set_yticklabels(sorted(sensors))
        top.set_title("activated time-steps")
        colors = _colors(sorted(locations))
        for uid in sorted(locations):
            s = locations[uid]
            ks = sorted(s.steps)
            xs = [_minutes(s.start_ms(k), t0) for k in ks]
            bottom.fill_between(xs, [s.steps[k].x_min for k in ks], [s.steps[k].x_max for k in ks],
                                step="post", alpha=0.4, color=colors[uid], label=f"user {uid}")
        bottom.set_ylabel("x extent (m)")
        bottom.set_xlabel("minutes")
        if locations:
            bottom.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
