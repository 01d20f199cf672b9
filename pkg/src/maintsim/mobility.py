"""Random-waypoint trajectories on the unbounded plane.

A trajectory is a chain of straight legs starting at the origin.  At each
waypoint the sensor draws an independent leg duration (exponential, mean
``1/lambda_rate``) and a velocity vector with iid ``Normal(0, sigma)``
components, then moves in a straight line for that long.  Waypoint
occurrences therefore form a Poisson process with rate ``lambda_rate``.

Trajectories are immutable after generation and safe to share between
replication workers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class ModelParams:
    """Mobility-model parameters.

    lambda_rate: waypoint rate (1/second), sigma: velocity-component standard
    deviation (unit/second), seed: base RNG seed, span: simulated horizon
    (seconds).
    """

    lambda_rate: float
    sigma: float
    seed: int
    span: float

    def __post_init__(self) -> None:
        if not self.lambda_rate > 0:
            raise ParameterError(f"lambda_rate must be > 0, got {self.lambda_rate}")
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if not self.span > 0:
            raise ParameterError(f"span must be > 0, got {self.span}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ParameterError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class Leg:
    """One straight segment of a trajectory."""

    start_time: float
    start_pos: tuple[float, float]
    velocity: tuple[float, float]
    duration: float


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear path; legs tile [0, span] with the last one allowed
    to overshoot the horizon (its full drawn duration is kept)."""

    span: float
    start_times: np.ndarray  # leg start times, start_times[0] == 0
    start_x: np.ndarray
    start_y: np.ndarray
    vel_x: np.ndarray
    vel_y: np.ndarray
    durations: np.ndarray

    @property
    def waypoint_times(self) -> np.ndarray:
        """Times of direction changes after the start (may exceed span)."""
        return self.start_times[1:]

    @property
    def legs(self) -> list[Leg]:
        return [
            Leg(
                start_time=float(self.start_times[i]),
                start_pos=(float(self.start_x[i]), float(self.start_y[i])),
                velocity=(float(self.vel_x[i]), float(self.vel_y[i])),
                duration=float(self.durations[i]),
            )
            for i in range(len(self.start_times))
        ]


def generate_trajectory(params: ModelParams, replication_index: int = 0) -> Trajectory:
    """Draw a trajectory covering [0, params.span].

    Deterministic given ``(params.seed, replication_index)``: each pair keys
    an independent RNG stream.  Legs are drawn until their cumulative
    duration reaches the span; the overshooting final leg is kept so the
    path can be evaluated up to the horizon without edge bias.
    """
    if int(replication_index) != replication_index or replication_index < 0:
        raise ParameterError(f"replication_index must be a non-negative integer, got {replication_index}")
    rng = np.random.default_rng([params.seed, replication_index])
    lam = params.lambda_rate

    expected = lam * params.span
    block = max(16, int(expected + 10.0 * math.sqrt(expected + 1.0) + 8))
    gaps = rng.standard_exponential(block, method="inv") / lam
    total = gaps.sum()
    while total < params.span:
        more = rng.standard_exponential(block, method="inv") / lam
        gaps = np.concatenate([gaps, more])
        total = gaps.sum()

    ends = np.cumsum(gaps)
    n_legs = int(np.searchsorted(ends, params.span, side="left")) + 1
    gaps = gaps[:n_legs]
    ends = ends[:n_legs]

    us = params.sigma * rng.standard_normal(n_legs)
    vs = params.sigma * rng.standard_normal(n_legs)

    start_times = np.concatenate([[0.0], ends[:-1]])
    xs = np.concatenate([[0.0], np.cumsum(us[:-1] * gaps[:-1])])
    ys = np.concatenate([[0.0], np.cumsum(vs[:-1] * gaps[:-1])])

    return Trajectory(
        span=params.span,
        start_times=start_times,
        start_x=xs,
        start_y=ys,
        vel_x=us,
        vel_y=vs,
        durations=gaps,
    )


def _check_time(traj: Trajectory, t) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0.0) or np.any(ts > traj.span):
        raise ParameterError(f"time outside [0, {traj.span}]")
    return ts


def position_at(traj: Trajectory, t):
    """True position at time ``t`` (scalar or array), 0 <= t <= span."""
    ts = _check_time(traj, t)
    idx = np.searchsorted(traj.start_times, ts, side="right") - 1
    dt = ts - traj.start_times[idx]
    x = traj.start_x[idx] + traj.vel_x[idx] * dt
    y = traj.start_y[idx] + traj.vel_y[idx] * dt
    if np.ndim(t) == 0:
        return float(x), float(y)
    return x, y


def waypoint_count(traj: Trajectory, t) -> int:
    """Number of waypoints in (0, t]."""
    ts = _check_time(traj, t)
    n = np.searchsorted(traj.waypoint_times, ts, side="right")
    if np.ndim(t) == 0:
        return int(n)
    return n


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Dump legs as CSV: leg_index, start_time, start_x, start_y, u, v, duration."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["leg_index", "start_time", "start_x", "start_y", "u", "v", "duration"])
        for i in range(len(traj.start_times)):
            writer.writerow(
                [
                    i,
                    repr(float(traj.start_times[i])),
                    repr(float(traj.start_x[i])),
                    repr(float(traj.start_y[i])),
                    repr(float(traj.vel_x[i])),
                    repr(float(traj.vel_y[i])),
                    repr(float(traj.durations[i])),
                ]
            )
