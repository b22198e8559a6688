"""Run artifacts: the sample series table, the summary, and the figures.

The CSV series is the canonical machine-readable output; figures are
rendered next to it so a run is inspectable without extra tooling. Float
cells use repr so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .orchestrator import ScaleEvent

SERIES_HEADER = "sim_time_s,zone_users,window_avg,desired_replicas,ready_replicas"


@dataclass(frozen=True)
class SampleRow:
    sim_time_s: float
    zone_users: int
    window_avg: float
    desired_replicas: int
    ready_replicas: int


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_series(rows: list[SampleRow], path: str | Path) -> None:
    lines = [SERIES_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                _cell(v)
                for v in (
                    row.sim_time_s,
                    row.zone_users,
                    row.window_avg,
                    row.desired_replicas,
                    row.ready_replicas,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_series(path: str | Path) -> list[SampleRow]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != SERIES_HEADER:
        raise ValueError(f"unexpected series header in {path}")
    rows = []
    for line in lines[1:]:
        t, zu, avg, desired, ready = line.split(",")
        rows.append(SampleRow(float(t), int(zu), float(avg), int(desired), int(ready)))
    return rows


def time_weighted_mean_replicas(
    initial_replicas: int, events: list[ScaleEvent], duration_s: float
) -> float:
    """Integrate the desired-replica step function over [0, duration]."""
    if duration_s <= 0:
        return float(initial_replicas)
    area = 0.0
    level = initial_replicas
    t_prev = 0.0
    for event in events:
        t = min(max(event.timestamp, t_prev), duration_s)
        area += level * (t - t_prev)
        level = event.to_replicas
        t_prev = t
    area += level * (duration_s - t_prev)
    return area / duration_s


def build_summary(
    rows: list[SampleRow],
    events: list[ScaleEvent],
    initial_replicas: int,
    duration_s: float,
    seed: int,
    ticks: int,
) -> dict:
    avgs = [row.window_avg for row in rows]
    return {
        "ticks": ticks,
        "duration_s": duration_s,
        "seed": seed,
        "samples": len(rows),
        "scale_actions": len(events),
        "scale_ups": sum(1 for e in events if e.to_replicas > e.from_replicas),
        "scale_downs": sum(1 for e in events if e.to_replicas < e.from_replicas),
        "time_weighted_mean_replicas": time_weighted_mean_replicas(initial_replicas, events, duration_s),
        "avg_users_min": min(avgs) if avgs else None,
        "avg_users_max": max(avgs) if avgs else None,
    }


def write_summary(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")


def render_figures(
    rows: list[SampleRow],
    events: list[ScaleEvent],
    gamma: float,
    zone_id: str,
    out_dir: str | Path,
) -> list[Path]:
    """Occupancy and replica-count charts, one PNG each."""
    out_dir = Path(out_dir)
    times = [row.sim_time_s for row in rows]
    written = []

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.step(times, [row.zone_users for row in rows], where="post", color="tab:gray",
            alpha=0.6, label="zone users")
    ax.plot(times, [row.window_avg for row in rows], color="tab:blue", label="window average")
    ax.axhline(gamma, color="tab:red", linestyle="--", linewidth=1, label=f"threshold {gamma:g}")
    ax.set_xlabel("simulation time [s]")
    ax.set_ylabel("users")
    ax.set_title(f"Occupancy of {zone_id}")
    ax.legend(loc="upper right")
    fig.tight_layout()
    occupancy_path = out_dir / "occupancy.png"
    fig.savefig(occupancy_path, dpi=110)
    plt.close(fig)
    written.append(occupancy_path)

    fig, ax = plt.subplots(figsize=(8, 4))
    ax.step(times, [row.desired_replicas for row in rows], where="post",
            color="tab:blue", label="desired")
    ax.step(times, [row.ready_replicas for row in rows], where="post",
            color="tab:green", linestyle=":", label="ready")
    for i, event in enumerate(events):
        ax.axvline(event.timestamp, color="tab:red", alpha=0.3, linewidth=1,
                   label="scale event" if i == 0 else None)
    ax.set_xlabel("simulation time [s]")
    ax.set_ylabel("replicas")
    ax.set_title("Replica counts")
    ax.yaxis.get_major_locator().set_params(integer=True)
    ax.legend(loc="upper right")
    fig.tight_layout()
    replicas_path = out_dir / "replicas.png"
    fig.savefig(replicas_path, dpi=110)
    plt.close(fig)
    written.append(replicas_path)
    return written
