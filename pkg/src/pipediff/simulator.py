"""Fixed-step traversal of a pipe network.

The robot's reference point advances along the centerline at the mean of
the three resolved track speeds (the differential holds that mean at the
nominal speed, in straights and bends alike).  Roll orientation is a
scenario constant: it is measured from each bend's inward direction and no
roll dynamics are modeled, matching the treatment of orientation as an
experiment parameter.  Speeds switch at the first record after a segment
boundary; there is no blending.

Runs are deterministic: identical inputs, including the disturbance seed,
produce bit-identical traces.  A single run is sequential state recurrence;
independent runs share nothing and may execute in parallel.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InfeasibleConstraintError, InvalidScenarioError, NoFitError
from .geometry import Bend, PipeNetwork, segment_length, validate_network
from .kinematics import (
    TRACK_NAMES,
    apply_disturbance,
    resolved_speeds,
    slip_and_ape,
    theoretical_speeds,
)
from .robot import RobotConfig, bend_tilts, module_state
from .transmission import GearTrainConfig

# Fraction of a segment's arc excluded at each end of the reporting window:
# speeds are averaged over the middle 80 percent, away from transition
# transients at the joints.
WINDOW_MARGIN = 0.1


@dataclass(frozen=True)
class DisturbanceConfig:
    """Optional multiplicative speed disturbance for error reporting."""

    amplitude: float = 0.0  # fraction, 0 disables
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.amplitude < 1.0):
            raise ValueError(f"disturbance amplitude must be in [0, 1), got {self.amplitude!r}")


@dataclass(frozen=True)
class SimParams:
    """Time stepping and input drive for one run."""

    omega_u: float  # rad/s, constant input speed
    dt: float = 0.01  # s
    theta_deg: float = 0.0  # roll orientation, degrees
    t_max: float | None = None  # s, optional stop time
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_max is not None and not (math.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError(f"t_max must be positive when set, got {self.t_max!r}")
        if not math.isfinite(self.omega_u):
            raise ValueError("omega_u must be finite")
        if not math.isfinite(self.theta_deg):
            raise ValueError("theta_deg must be finite")

    @property
    def theta_rad(self) -> float:
        return math.radians(self.theta_deg)


@dataclass(frozen=True)
class TraceRecord:
    """One time sample of the traversal."""

    t: float  # s
    s: float  # mm along the centerline
    segment: int
    theta_deg: float
    v: tuple[float, float, float]  # mm/s, resolved (disturbed when enabled)
    v_theo: tuple[float, float, float]  # mm/s, geometry-required
    compression: tuple[float, float, float]  # mm
    slip: tuple[float, float, float]  # mm/s
    distance: tuple[float, float, float]  # mm, cumulative per track


@dataclass(frozen=True)
class SimState:
    """Recurrence state between steps."""

    t: float = 0.0
    s: float = 0.0
    distances: tuple[float, float, float] = (0.0, 0.0, 0.0)
    done: bool = False


@dataclass(frozen=True)
class SegmentSummary:
    """Aggregates over the records that fell inside one segment."""

    index: int
    kind: str  # "straight" or "bend <sweep>deg"
    length: float  # mm
    entry_time: float  # s
    exit_time: float  # s
    mean_speeds: tuple[float, float, float]  # mm/s, midpoint-window average
    min_speeds: tuple[float, float, float]  # mm/s, over the whole segment
    max_speeds: tuple[float, float, float]
    ape: tuple[float | None, float | None, float | None]  # percent, window average
    max_compression: float  # mm
    max_tilt_deg: float
    compression_ok: bool
    tilt_ok: bool


@dataclass(frozen=True)
class TrackTotals:
    """Whole-run aggregates for one track."""

    name: str
    distance: float  # mm
    mean_speed: float  # mm/s, distance / total time
    max_slip: float  # mm/s
    max_ape: float | None  # percent, worst segment window


@dataclass(frozen=True)
class RunSummary:
    completed: bool
    stop_reason: str | None  # None, "t_max"
    error: str | None  # abort cause, None on a clean run
    total_time: float  # s, time of the last record
    total_length: float  # mm
    effective_path: float | None  # mm, total minus robot length
    nominal_speed: float  # mm/s
    theta_deg: float
    dt: float
    disturbance_amplitude: float
    disturbance_seed: int
    max_slip: float  # mm/s over all records and tracks
    max_compression: float  # mm over all records and modules
    segments: tuple[SegmentSummary, ...]
    tracks: tuple[TrackTotals, TrackTotals, TrackTotals]


def effective_robot_path(net: PipeNetwork, robot: RobotConfig) -> float:
    """Distance the reference point travels from fully inserted to emerged."""
    total = net.total_length
    if total < robot.length:
        raise InvalidScenarioError(
            f"network length {total:g} mm is shorter than the robot ({robot.length:g} mm)"
        )
    return total - robot.length


def _observe(
    net: PipeNetwork,
    robot: RobotConfig,
    gear: GearTrainConfig,
    params: SimParams,
    t: float,
    s: float,
    distances: tuple[float, float, float],
    rng,
    v_nominal: float,
) -> TraceRecord:
    """Evaluate speeds, compressions, and slip at position ``s``."""
    index, _ = net.segment_at(s)
    segment = net.segments[index]
    theta = params.theta_rad
    state = module_state(robot, net.spec, segment, theta)
    wall_radius = net.spec.inner_radius
    demanded = theoretical_speeds(segment, theta, v_nominal, wall_radius)
    resolved = resolved_speeds(
        gear, robot, segment, theta, params.omega_u, contact_radius=wall_radius
    )
    if rng is not None:
        resolved = apply_disturbance(resolved, params.disturbance.amplitude, rng)
    report = slip_and_ape(resolved, demanded)
    return TraceRecord(
        t=t,
        s=s,
        segment=index,
        theta_deg=params.theta_deg,
        v=resolved.as_tuple(),
        v_theo=demanded.as_tuple(),
        compression=state.compressions,
        slip=report.slips,
        distance=distances,
    )


def step(
    state: SimState,
    net: PipeNetwork,
    robot: RobotConfig,
    gear: GearTrainConfig,
    params: SimParams,
    rng=None,
) -> tuple[SimState, TraceRecord]:
    """Advance one tick.

    Returns the new state and the record observed at the starting position.
    Reaching the network end sets ``done`` on the returned state.  With a
    nonzero disturbance amplitude the caller must supply the generator.

    Raises:
        NoFitError: the segment at the current position is impassable.
        ValueError: stepping a completed state or past the network end.
    """
    if state.done:
        raise ValueError("simulation already completed")
    total = net.total_length
    if state.s > total:
        raise ValueError(f"position {state.s!r} mm is past the network end")
    if params.disturbance.amplitude > 0.0 and rng is None:
        raise ValueError("disturbance enabled; pass the seeded generator explicitly")
    v_nominal = gear.ratio * params.omega_u * robot.sprocket_radius
    record = _observe(net, robot, gear, params, state.t, state.s, state.distances, rng, v_nominal)
    if state.s >= total:
        return SimState(state.t, state.s, state.distances, done=True), record
    mean_v = math.fsum(record.v) / 3.0
    new_s = min(state.s + mean_v * params.dt, total)
    new_distances = tuple(d + v * params.dt for d, v in zip(state.distances, record.v))
    return SimState(state.t + params.dt, new_s, new_distances, done=False), record


def run(
    net: PipeNetwork,
    robot: RobotConfig,
    gear: GearTrainConfig,
    params: SimParams,
) -> tuple[list[TraceRecord], RunSummary]:
    """Simulate until the network end, ``t_max``, or an abort.

    A no-fit or infeasible-constraint abort keeps the partial trace and
    records the cause in the summary instead of raising.

    Raises:
        InvalidScenarioError: the network fails validation or the nominal
            track speed is not positive.
    """
    violations = validate_network(net)
    if violations:
        raise InvalidScenarioError(
            "network invalid: " + "; ".join(str(v) for v in violations)
        )
    v_nominal = gear.ratio * params.omega_u * robot.sprocket_radius
    if v_nominal <= 0.0:
        raise InvalidScenarioError(
            f"nominal track speed must be positive, got {v_nominal:g} mm/s"
        )
    total = net.total_length
    amplitude = params.disturbance.amplitude
    rng = np.random.default_rng(params.disturbance.seed) if amplitude > 0.0 else None

    records: list[TraceRecord] = []
    s = 0.0
    k = 0
    distances = (0.0, 0.0, 0.0)
    completed = False
    stop_reason = None
    error = None
    while True:
        t = k * params.dt
        try:
            record = _observe(net, robot, gear, params, t, s, distances, rng, v_nominal)
        except (NoFitError, InfeasibleConstraintError) as exc:
            error = str(exc)
            break
        records.append(record)
        if s >= total:
            completed = True
            break
        if params.t_max is not None and t >= params.t_max - 1e-12:
            stop_reason = "t_max"
            break
        mean_v = math.fsum(record.v) / 3.0
        if mean_v <= 0.0:
            error = f"stalled: mean track speed {mean_v:g} mm/s is not positive"
            break
        s = min(s + mean_v * params.dt, total)
        distances = tuple(d + v * params.dt for d, v in zip(distances, record.v))
        k += 1

    summary = _summarize(net, robot, params, records, completed, stop_reason, error, v_nominal)
    return records, summary


def run_orientation_sweep(
    net: PipeNetwork,
    robot: RobotConfig,
    gear: GearTrainConfig,
    params: SimParams,
    steps: int,
) -> list[tuple[float, list[TraceRecord], RunSummary]]:
    """Run ``steps`` evenly spaced roll orientations over a full turn.

    Results come back in orientation order; when a disturbance is active,
    orientation k uses seed ``base_seed + k`` so the runs stay independent
    yet reproducible.
    """
    if steps < 1:
        raise ValueError("at least one orientation required")
    results = []
    for k in range(steps):
        theta = k * 360.0 / steps
        disturbance = replace(params.disturbance, seed=params.disturbance.seed + k)
        oriented = replace(params, theta_deg=theta, disturbance=disturbance)
        records, summary = run(net, robot, gear, oriented)
        results.append((theta, records, summary))
    return results


def _segment_kind(segment) -> str:
    if isinstance(segment, Bend):
        return f"bend {segment.sweep_deg:g}deg"
    return "straight"


def _summarize(
    net: PipeNetwork,
    robot: RobotConfig,
    params: SimParams,
    records: list[TraceRecord],
    completed: bool,
    stop_reason: str | None,
    error: str | None,
    v_nominal: float,
) -> RunSummary:
    groups: dict[int, list[TraceRecord]] = {}
    for record in records:
        groups.setdefault(record.segment, []).append(record)

    summaries = []
    for index in sorted(groups):
        recs = groups[index]
        segment = net.segments[index]
        length = segment_length(segment)
        start = net.arc_start(index)
        lo = start + WINDOW_MARGIN * length
        hi = start + (1.0 - WINDOW_MARGIN) * length
        window = [r for r in recs if lo <= r.s <= hi] or recs

        mean_speeds = tuple(
            math.fsum(r.v[i] for r in window) / len(window) for i in range(3)
        )
        min_speeds = tuple(min(r.v[i] for r in recs) for i in range(3))
        max_speeds = tuple(max(r.v[i] for r in recs) for i in range(3))
        ape = []
        for i in range(3):
            terms = [
                100.0 * r.slip[i] / abs(r.v_theo[i]) for r in window if r.v_theo[i] != 0.0
            ]
            ape.append(math.fsum(terms) / len(terms) if terms else None)
        max_compression = max(max(r.compression) for r in recs)
        if isinstance(segment, Bend):
            max_tilt = max(bend_tilts(robot, segment, params.theta_rad))
        else:
            max_tilt = 0.0
        next_recs = groups.get(index + 1)
        exit_time = next_recs[0].t if next_recs else recs[-1].t
        summaries.append(
            SegmentSummary(
                index=index,
                kind=_segment_kind(segment),
                length=length,
                entry_time=recs[0].t,
                exit_time=exit_time,
                mean_speeds=mean_speeds,
                min_speeds=min_speeds,
                max_speeds=max_speeds,
                ape=tuple(ape),
                max_compression=max_compression,
                max_tilt_deg=max_tilt,
                compression_ok=max_compression <= robot.max_compression,
                tilt_ok=max_tilt <= robot.max_tilt_deg,
            )
        )

    total_time = records[-1].t if records else 0.0
    tracks = []
    for i, name in enumerate(TRACK_NAMES):
        distance = records[-1].distance[i] if records else 0.0
        apes = [s.ape[i] for s in summaries if s.ape[i] is not None]
        tracks.append(
            TrackTotals(
                name=name,
                distance=distance,
                mean_speed=distance / total_time if total_time > 0.0 else 0.0,
                max_slip=max((r.slip[i] for r in records), default=0.0),
                max_ape=max(apes) if apes else None,
            )
        )

    total = net.total_length
    effective = total - robot.length if total >= robot.length else None
    return RunSummary(
        completed=completed,
        stop_reason=stop_reason,
        error=error,
        total_time=total_time,
        total_length=total,
        effective_path=effective,
        nominal_speed=v_nominal,
        theta_deg=params.theta_deg,
        dt=params.dt,
        disturbance_amplitude=params.disturbance.amplitude,
        disturbance_seed=params.disturbance.seed,
        max_slip=max((max(r.slip) for r in records), default=0.0),
        max_compression=max((max(r.compression) for r in records), default=0.0),
        segments=tuple(summaries),
        tracks=tuple(tracks),
    )
