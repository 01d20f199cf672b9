"""Replicated experiments: error vs localization count, simulated vs
closed-form error over the localization period, the constant-ratio sweep,
and Monte Carlo validation of the conditional-moment formulas.

Two simulation engines coexist.  The period sweeps use a vectorized
window engine: each replication is one localization window [0, T] with
exact fixes at both ends and the estimate is the straight line between
them, which is exactly what the timer-driven interpolation protocol
computes inside every window (waypoint occurrences are memoryless, so
windows of a long run are identically distributed to a fresh one).  The
count experiment runs the event-driven protocol state machines so that
adaptive schemes are exercised as specified.  A cross-check test keeps the
engines honest against each other.

Replications are independent work items: each owns an RNG stream keyed by
(seed, stream tag, index), and aggregation is a pure function of the
collected records, so results do not depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import (
    ErrorQuery,
    cond_interarrival_moment,
    cond_position_second_moment,
    cond_waypoint_time_moment,
    ConditionalMomentQuery,
    displacement_cross_moment,
    error_asymptote,
    error_avg,
    position_second_moment,
    position_second_moment_given_count,
)
from .errors import ParameterError
from .mobility import ModelParams, Trajectory, generate_trajectory, position_at
from .protocols import (
    DvmConfig,
    DvmState,
    MadrdConfig,
    MadrdState,
    Query,
    dvm_next_interval,
    dvm_on_localization,
    interpolate,
    localize,
    madrd_on_localization,
    maint_init,
    maint_on_query,
    maint_on_timer,
    sfr_schedule,
)

# stream tags: montecarlo streams are (seed, tag, index); trajectory streams
# are (seed, replication) so the key lengths never collide
_STREAM_QUERY = 101
_STREAM_PERIOD = 102
_STREAM_ASYMPTOTE = 103
_STREAM_MOMENTS = 104

KNOWN_PROTOCOLS = ("MAINT", "MADRD", "SFR", "DVM")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment settings; defaults reproduce the published setup
    (sigma = 5 unit/s, mean 10 s between waypoints, 100 s spans)."""

    model: ModelParams
    protocols: tuple[str, ...] = ("MAINT", "MADRD")
    T_values: tuple[float, ...] = ()
    replications: int = 100
    queries_per_replication: int = 1
    ratio_C: float | None = None
    maint_periods: tuple[float, ...] = (2.0, 4.0, 5.0, 10.0, 20.0, 25.0, 50.0)
    madrd_intervals: tuple[float, ...] = (2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 35.0, 50.0)
    e_thresh: float = 5.0
    dvm_threshold: float = 5.0

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ParameterError(f"replications must be >= 1, got {self.replications}")
        if self.queries_per_replication < 1:
            raise ParameterError(f"queries_per_replication must be >= 1, got {self.queries_per_replication}")
        unknown = [p for p in self.protocols if p not in KNOWN_PROTOCOLS]
        if unknown:
            raise ParameterError(f"unknown protocols: {unknown}; known: {KNOWN_PROTOCOLS}")
        if self.ratio_C is not None and not self.ratio_C > 0:
            raise ParameterError(f"ratio_C must be > 0, got {self.ratio_C}")


@dataclass(frozen=True)
class ErrorRecord:
    """One query evaluation of one protocol in one replication."""

    protocol: str
    replication_index: int
    query_time: float
    sq_error: float
    abs_error: float
    localization_count: int


@dataclass(frozen=True)
class BinnedResult:
    """Per-localization-count aggregate of error records."""

    key: int
    mean_sq_error: float
    mean_abs_error: float
    sample_count: int
    standard_error: float
    standard_error_abs: float


@dataclass(frozen=True)
class PeriodPoint:
    T: float
    mean_sq_error: float
    std_error: float
    samples: int
    theory: float


@dataclass(frozen=True)
class AsymptotePoint:
    T: float
    lambda_rate: float
    mean_sq_error: float
    std_error: float
    samples: int
    theory: float
    asymptote: float


# ---------------------------------------------------------------------------
# vectorized window engine


def _window_legs(rng: np.random.Generator, lam: float, horizon: float, rows: int):
    """Leg matrices for ``rows`` independent windows covering [0, horizon].

    Rows whose drawn legs fall short are padded with further draws; padding
    other rows with zero-duration legs keeps the matrices rectangular and
    contributes nothing to positions.
    """
    expected = lam * horizon
    cols = max(8, int(expected + 10.0 * math.sqrt(expected + 1.0) + 8))
    gaps = rng.standard_exponential((rows, cols), method="inv") / lam
    total = gaps.sum(axis=1)
    while True:
        short = total < horizon
        if not short.any():
            break
        pad = np.zeros((rows, cols))
        pad[short] = rng.standard_exponential((int(short.sum()), cols), method="inv") / lam
        gaps = np.hstack([gaps, pad])
        total += pad.sum(axis=1)
    starts = np.hstack([np.zeros((rows, 1)), np.cumsum(gaps, axis=1)[:, :-1]])
    return gaps, starts


def _positions(gaps: np.ndarray, starts: np.ndarray, vel: np.ndarray, s) -> np.ndarray:
    """Coordinate at time(s) ``s`` (scalar or per-row vector) for every row."""
    diff = (s - starts) if np.ndim(s) == 0 else (np.asarray(s)[:, None] - starts)
    seg = np.clip(diff, 0.0, gaps)
    return (vel * seg).sum(axis=1)


def sample_window_errors(
    rng: np.random.Generator,
    lambda_rate: float,
    sigma: float,
    T: float,
    n_windows: int,
    n_queries: int,
    batch: int = 4096,
) -> np.ndarray:
    """Squared interpolation errors, shape (n_windows, n_queries).

    Each window is localized exactly at 0 and T; each query time is uniform
    on [0, T] and answered with the straight line between the two fixes.
    Queries within a window share its trajectory, so rows are the
    independent units for standard errors.
    """
    out = np.empty((n_windows, n_queries))
    done = 0
    while done < n_windows:
        m = min(batch, n_windows - done)
        gaps, starts = _window_legs(rng, lambda_rate, T, m)
        u = sigma * rng.standard_normal(gaps.shape)
        v = sigma * rng.standard_normal(gaps.shape)
        x_end = _positions(gaps, starts, u, T)
        y_end = _positions(gaps, starts, v, T)
        for qi in range(n_queries):
            tq = rng.uniform(0.0, T, m)
            frac = tq / T
            ex = _positions(gaps, starts, u, tq) - x_end * frac
            ey = _positions(gaps, starts, v, tq) - y_end * frac
            out[done : done + m, qi] = ex * ex + ey * ey
        done += m
    return out


def sample_window_positions(
    rng: np.random.Generator,
    lambda_rate: float,
    sigma: float,
    horizon: float,
    n_windows: int,
    eval_times,
    batch: int = 4096,
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates at fixed times for independent windows; shapes
    (n_windows, len(eval_times)).  Used by the moment-validation oracles."""
    times = [float(t) for t in eval_times]
    xs = np.empty((n_windows, len(times)))
    ys = np.empty((n_windows, len(times)))
    done = 0
    while done < n_windows:
        m = min(batch, n_windows - done)
        gaps, starts = _window_legs(rng, lambda_rate, horizon, m)
        u = sigma * rng.standard_normal(gaps.shape)
        v = sigma * rng.standard_normal(gaps.shape)
        for j, t in enumerate(times):
            xs[done : done + m, j] = _positions(gaps, starts, u, t)
            ys[done : done + m, j] = _positions(gaps, starts, v, t)
        done += m
    return xs, ys


# ---------------------------------------------------------------------------
# event-driven protocol runners (one replication each)


def run_maint_timer(traj: Trajectory, period: float, query_times, noise=None, log=None):
    """Timer-driven interpolation protocol over the full span.

    Localizations fire at 0, period, 2*period, ... regardless of traffic, so
    the call count is floor(span/period) + 1 exactly.  Every query must fall
    at or before the final tick (otherwise no enclosing pair ever exists).
    Returns (estimates (n, 2), localization count).
    """
    qts = np.asarray(query_times, dtype=float)
    ticks = sfr_schedule(period, traj.span)[1:]
    if qts.size and not len(ticks):
        raise ParameterError(f"period {period} schedules no tick within the span; nothing can bracket a query")
    horizon = float(ticks[-1]) if len(ticks) else 0.0
    if qts.size and qts.max() > horizon:
        raise ParameterError(
            f"query at {qts.max()} lies beyond the final localization at {horizon}"
        )
    state = maint_init(traj, period, mode="timer", noise=noise)
    if log is not None:
        log.record(0.0, "localization", "", *state.last_fix.pos)
    events = sorted(
        [(float(t), 0, i) for i, t in enumerate(qts)] + [(float(t), 1, -1) for t in ticks]
    )
    est = np.empty((qts.size, 2))
    for when, kind, idx in events:
        if kind == 0:
            maint_on_query(state, Query(time=when, requester=idx), traj, clock=when)
            if log is not None:
                log.record(when, "query", idx, math.nan, math.nan)
        else:
            responses = maint_on_timer(state, traj, when)
            if log is not None:
                log.record(when, "localization", "", *state.last_fix.pos)
            for resp in responses:
                est[resp.requester] = interpolate(resp.fix_a, resp.fix_b, qts[resp.requester])
                if log is not None:
                    log.record(when, "response", resp.requester, *est[resp.requester])
    return est, state.calls


def run_maint_query_driven(traj: Trajectory, period: float, query_times, immediate: bool = False):
    """On-demand variant: a query fires localization when it arrives at or
    past last fix + period (or always, in immediate mode).  Queries still
    buffered when the span ends stay unanswered (NaN estimates)."""
    qts = np.asarray(query_times, dtype=float)
    state = maint_init(traj, period, mode="query", immediate_mode=immediate)
    est = np.full((qts.size, 2), np.nan)
    for i in np.argsort(qts, kind="stable"):
        t = float(qts[i])
        for resp in maint_on_query(state, Query(time=t, requester=int(i)), traj, clock=t):
            est[resp.requester] = interpolate(resp.fix_a, resp.fix_b, qts[resp.requester])
    return est, state.calls


def run_sfr(traj: Trajectory, period: float, query_times):
    """Fixed-rate baseline: answer every query with the latest fix."""
    qts = np.asarray(query_times, dtype=float)
    ticks = sfr_schedule(period, traj.span)
    fx, fy = position_at(traj, ticks)
    idx = np.searchsorted(ticks, qts, side="right") - 1
    return np.column_stack([fx[idx], fy[idx]]), len(ticks)


def _madrd_fix_sequence(traj: Trajectory, cfg: MadrdConfig):
    """All MADRD localizations over the span.

    Bootstrap: one fix at 0 and one after the base interval (no velocity is
    defined until two fixes exist); adaptation starts at the third fix.
    """
    fix0 = localize(traj, 0.0)
    if cfg.base_interval >= traj.span:
        return [fix0], 1
    fix1 = localize(traj, cfg.base_interval)
    state = MadrdState(fix_prev=fix0, fix_last=fix1, next_interval=cfg.base_interval, config=cfg)
    fixes = [fix0, fix1]
    next_t = state.fix_last.time + state.next_interval
    while next_t <= traj.span:
        madrd_on_localization(state, localize(traj, next_t))
        fixes.append(state.fix_last)
        next_t = state.fix_last.time + state.next_interval
    return fixes, state.calls


def run_madrd(traj: Trajectory, cfg: MadrdConfig, query_times):
    """Dead-reckoning baseline: answer each query by extrapolating from the
    last two fixes known at the query time (stationary before the second
    fix exists)."""
    qts = np.asarray(query_times, dtype=float)
    fixes, calls = _madrd_fix_sequence(traj, cfg)
    times = np.array([f.time for f in fixes])
    fx = np.array([f.pos[0] for f in fixes])
    fy = np.array([f.pos[1] for f in fixes])
    j = np.searchsorted(times, qts, side="right") - 1
    est = np.empty((qts.size, 2))
    first = j == 0
    est[first, 0] = fx[0]
    est[first, 1] = fy[0]
    later = ~first
    if later.any():
        jl = j[later]
        dt = times[jl] - times[jl - 1]
        age = qts[later] - times[jl]
        est[later, 0] = fx[jl] + (fx[jl] - fx[jl - 1]) / dt * age
        est[later, 1] = fy[jl] + (fy[jl] - fy[jl - 1]) / dt * age
    return est, calls


def run_dvm(traj: Trajectory, cfg: DvmConfig, query_times, bootstrap_interval: float = 1.0):
    """Velocity-monotonic baseline: schedule by recent speed, answer with the
    latest fix."""
    qts = np.asarray(query_times, dtype=float)
    fix0 = localize(traj, 0.0)
    if bootstrap_interval >= traj.span:
        return np.tile(fix0.pos, (qts.size, 1)), 1
    fix1 = localize(traj, bootstrap_interval)
    state = DvmState(fix_prev=fix0, fix_last=fix1, config=cfg)
    fixes = [fix0, fix1]
    next_t = state.fix_last.time + dvm_next_interval(state)
    while next_t <= traj.span:
        dvm_on_localization(state, localize(traj, next_t))
        fixes.append(state.fix_last)
        next_t = state.fix_last.time + dvm_next_interval(state)
    times = np.array([f.time for f in fixes])
    fx = np.array([f.pos[0] for f in fixes])
    fy = np.array([f.pos[1] for f in fixes])
    j = np.searchsorted(times, qts, side="right") - 1
    return np.column_stack([fx[j], fy[j]]), state.calls


# ---------------------------------------------------------------------------
# error-vs-count experiment


def collect_error_records(cfg: ExperimentConfig) -> list[ErrorRecord]:
    """Run every configured protocol over fresh trajectories and record one
    error sample per query.

    Per replication: generate the trajectory, draw query times uniformly on
    [0, span], and give every protocol the same trajectory and queries.
    Truth comes from the trajectory; estimates only from protocol-visible
    fixes.  Sweep parameters (interpolation period, dead-reckoning base
    interval) cycle through their grids across replications to populate the
    localization-count axis.
    """
    model = cfg.model
    protos = cfg.protocols
    if "MAINT" in protos:
        for p in cfg.maint_periods:
            n = math.floor(model.span / p * (1.0 + 1e-12))
            if abs(n * p - model.span) > 1e-9 * model.span:
                raise ParameterError(
                    f"maint period {p} does not divide span {model.span}; "
                    "late queries could never be bracketed"
                )
    records: list[ErrorRecord] = []
    for r in range(cfg.replications):
        traj = generate_trajectory(model, r)
        qrng = np.random.default_rng([model.seed, _STREAM_QUERY, r])
        qts = qrng.uniform(0.0, model.span, cfg.queries_per_replication)
        tx, ty = position_at(traj, qts)

        def add(protocol: str, est: np.ndarray, calls: int) -> None:
            ex = est[:, 0] - tx
            ey = est[:, 1] - ty
            sq = ex * ex + ey * ey
            for qi in range(qts.size):
                records.append(
                    ErrorRecord(
                        protocol=protocol,
                        replication_index=r,
                        query_time=float(qts[qi]),
                        sq_error=float(sq[qi]),
                        abs_error=float(math.sqrt(sq[qi])),
                        localization_count=int(calls),
                    )
                )

        if "MAINT" in protos:
            period = cfg.maint_periods[r % len(cfg.maint_periods)]
            add("MAINT", *run_maint_timer(traj, period, qts))
        if "MADRD" in protos:
            base = cfg.madrd_intervals[r % len(cfg.madrd_intervals)]
            mcfg = MadrdConfig(base_interval=base, e_thresh=cfg.e_thresh)
            add("MADRD", *run_madrd(traj, mcfg, qts))
        if "SFR" in protos:
            period = cfg.maint_periods[r % len(cfg.maint_periods)]
            add("SFR", *run_sfr(traj, period, qts))
        if "DVM" in protos:
            add("DVM", *run_dvm(traj, DvmConfig(threshold_distance=cfg.dvm_threshold), qts))
    return records


def bin_records(records) -> dict[str, list[BinnedResult]]:
    """Group records by (protocol, localization count) and aggregate.

    Pure function of the record multiset: permuting the input changes no
    mean beyond float-summation noise.  Empty bins simply do not appear.
    """
    grouped: dict[tuple[str, int], list[ErrorRecord]] = {}
    for rec in records:
        grouped.setdefault((rec.protocol, rec.localization_count), []).append(rec)
    out: dict[str, list[BinnedResult]] = {}
    for (protocol, count) in sorted(grouped):
        bucket = grouped[(protocol, count)]
        sq = np.array(sorted(r.sq_error for r in bucket))
        ab = np.array(sorted(r.abs_error for r in bucket))
        n = len(bucket)
        out.setdefault(protocol, []).append(
            BinnedResult(
                key=count,
                mean_sq_error=float(sq.mean()),
                mean_abs_error=float(ab.mean()),
                sample_count=n,
                standard_error=float(sq.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                standard_error_abs=float(ab.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
            )
        )
    return out


def run_error_vs_count(cfg: ExperimentConfig) -> dict[str, list[BinnedResult]]:
    """Error against localization count for the interpolation protocol and
    the dead-reckoning baseline over identical trajectories."""
    if not {"MAINT", "MADRD"}.issubset(cfg.protocols):
        raise ParameterError("the count experiment needs both MAINT and MADRD configured")
    return bin_records(collect_error_records(cfg))


# ---------------------------------------------------------------------------
# period sweeps


def run_error_vs_period(cfg: ExperimentConfig) -> list[PeriodPoint]:
    """Simulated mean squared error per localization period, paired with the
    closed-form average; one window per replication, timer-style fixes at 0
    and T."""
    if not cfg.T_values:
        raise ParameterError("T_values must be non-empty for a period sweep")
    model = cfg.model
    points = []
    for i, T in enumerate(cfg.T_values):
        rng = np.random.default_rng([model.seed, _STREAM_PERIOD, i])
        sq = sample_window_errors(
            rng, model.lambda_rate, model.sigma, float(T), cfg.replications, cfg.queries_per_replication
        )
        window_means = sq.mean(axis=1)
        se = float(window_means.std(ddof=1) / math.sqrt(len(window_means))) if len(window_means) > 1 else 0.0
        theory = error_avg(ErrorQuery(sigma=model.sigma, lambda_rate=model.lambda_rate, T=float(T)))
        points.append(
            PeriodPoint(T=float(T), mean_sq_error=float(sq.mean()), std_error=se, samples=sq.size, theory=theory)
        )
    return points


def run_asymptotic_sweep(cfg: ExperimentConfig) -> list[AsymptotePoint]:
    """Period sweep with the waypoint rate tied to the period (lambda = T/C),
    against both the exact average and its constant limit 2 sigma^2 C / 3."""
    if cfg.ratio_C is None:
        raise ParameterError("ratio_C is required for the asymptotic sweep")
    if not cfg.T_values:
        raise ParameterError("T_values must be non-empty for a period sweep")
    model = cfg.model
    limit = error_asymptote(model.sigma, cfg.ratio_C)
    points = []
    for i, T in enumerate(cfg.T_values):
        lam = float(T) / cfg.ratio_C
        rng = np.random.default_rng([model.seed, _STREAM_ASYMPTOTE, i])
        sq = sample_window_errors(rng, lam, model.sigma, float(T), cfg.replications, cfg.queries_per_replication)
        window_means = sq.mean(axis=1)
        se = float(window_means.std(ddof=1) / math.sqrt(len(window_means))) if len(window_means) > 1 else 0.0
        theory = error_avg(ErrorQuery(sigma=model.sigma, lambda_rate=lam, T=float(T)))
        points.append(
            AsymptotePoint(
                T=float(T),
                lambda_rate=lam,
                mean_sq_error=float(sq.mean()),
                std_error=se,
                samples=sq.size,
                theory=theory,
                asymptote=limit,
            )
        )
    return points


# ---------------------------------------------------------------------------
# conditional-moment validation


@dataclass(frozen=True)
class MomentCheck:
    name: str
    mc_mean: float
    std_error: float
    theory: float
    z: float
    samples: int
    skipped: bool = False


@dataclass
class MomentReport:
    checks: list[MomentCheck] = field(default_factory=list)

    @property
    def max_abs_z(self) -> float:
        zs = [abs(c.z) for c in self.checks if not c.skipped]
        return max(zs) if zs else 0.0

    @property
    def passed(self) -> bool:
        return all(abs(c.z) < 4.0 for c in self.checks if not c.skipped)

    def rows(self):
        for c in self.checks:
            yield (c.name, c.mc_mean, c.std_error, c.theory, c.z, c.samples, c.skipped)


def _z_check(name: str, sample: np.ndarray, theory: float) -> MomentCheck:
    mean = float(sample.mean())
    se = float(sample.std(ddof=1) / math.sqrt(sample.size))
    z = (mean - theory) / se if se > 0 else 0.0
    return MomentCheck(name=name, mc_mean=mean, std_error=se, theory=theory, z=float(z), samples=sample.size)


def validate_conditional_moments(
    tau: float = 10.0,
    sigma: float = 5.0,
    lambda_rate: float = 0.1,
    t: float = 5.0,
    T: float = 10.0,
    n_max: int = 6,
    samples: int = 100_000,
    seed: int = 0,
) -> MomentReport:
    """Monte Carlo z-scores for every conditional-moment formula.

    Conditioned quantities are sampled by construction (given n waypoints in
    (0, tau), their times are sorted uniforms), so no rejection is needed
    and nothing is skipped.  The unconditional second moment and the
    cross moment come from direct window simulation.  Passing means every
    |z| < 4.
    """
    if samples < 10_000:
        raise ParameterError(f"samples must be >= 10000, got {samples}")
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    rng = np.random.default_rng([seed, _STREAM_MOMENTS])
    report = MomentReport()

    for n in range(1, n_max + 1):
        wp = np.sort(rng.uniform(0.0, tau, (samples, n)), axis=1)
        gaps = np.diff(wp, axis=1, prepend=0.0)
        vel = sigma * rng.standard_normal((samples, n))
        pos = np.cumsum(vel * gaps, axis=1)
        for k in range(1, n + 1):
            col = k - 1
            report.checks.append(
                _z_check(
                    f"waypoint_time n={n} k={k} order=1",
                    wp[:, col],
                    cond_waypoint_time_moment(ConditionalMomentQuery(tau=tau, n=n, k=k, order=1)),
                )
            )
            report.checks.append(
                _z_check(
                    f"waypoint_time n={n} k={k} order=2",
                    wp[:, col] ** 2,
                    cond_waypoint_time_moment(ConditionalMomentQuery(tau=tau, n=n, k=k, order=2)),
                )
            )
            report.checks.append(
                _z_check(
                    f"interarrival n={n} k={k} order=1",
                    gaps[:, col],
                    cond_interarrival_moment(tau, n, 1),
                )
            )
            report.checks.append(
                _z_check(
                    f"interarrival n={n} k={k} order=2",
                    gaps[:, col] ** 2,
                    cond_interarrival_moment(tau, n, 2),
                )
            )
            report.checks.append(
                _z_check(
                    f"waypoint_position_sq n={n} k={k}",
                    pos[:, col] ** 2,
                    cond_position_second_moment(tau, n, k, sigma),
                )
            )

    # position second moment given an exact waypoint count in (0, t)
    for i in range(0, n_max + 1):
        if i == 0:
            x = t * sigma * rng.standard_normal(samples)
        else:
            wp = np.sort(rng.uniform(0.0, t, (samples, i)), axis=1)
            gaps = np.diff(wp, axis=1, prepend=0.0)
            vel = sigma * rng.standard_normal((samples, i + 1))
            x = (vel[:, :i] * gaps).sum(axis=1) + (t - wp[:, i - 1]) * vel[:, i]
        report.checks.append(
            _z_check(
                f"position_sq_given_count i={i}",
                x**2,
                position_second_moment_given_count(t, i, sigma),
            )
        )

    # unconditional position second moment and the split-window cross moment;
    # x and y coordinates are iid so both contribute samples
    xs, ys = sample_window_positions(rng, lambda_rate, sigma, T, samples, (t, T))
    at_t = np.concatenate([xs[:, 0], ys[:, 0]])
    at_T = np.concatenate([xs[:, 1], ys[:, 1]])
    report.checks.append(
        _z_check("position_sq_unconditional", at_t**2, position_second_moment(t, lambda_rate, sigma))
    )
    report.checks.append(
        _z_check(
            "displacement_cross_moment",
            at_t * (at_T - at_t),
            displacement_cross_moment(t, T, lambda_rate, sigma),
        )
    )
    return report
