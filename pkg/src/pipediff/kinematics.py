"""Per-segment track speeds, differential resolution, and slip metrics.

``theoretical_speeds`` gives the speeds the geometry demands: uniform in a
straight, scaled by each module's path radius inside a bend.  Because the
three path radii average to the bend radius, the demanded speeds always
average to the nominal speed, which is exactly the budget the differential
distributes -- so the wall constraints are feasible and the resolved speeds
match the geometric ones.  That is the no-slip mechanism, restated at the
level where it is literally true.

The path radius uses the wall radius of the pipe: under maintained contact
a module's contact point sits on the inner wall, so its distance from the
pipe axis equals the pipe's inner radius regardless of spring state.

A seeded multiplicative disturbance can be layered on the resolved speeds
to emulate contact irregularity for error-reporting purposes; the generator
is always passed explicitly, never hidden in module state.
"""

import math
from dataclasses import dataclass

from .geometry import Segment, Straight, module_path_radius
from .robot import RobotConfig
from .transmission import GearTrainConfig, LoadState, imposed_speed, solve_output_speeds

TRACK_NAMES = ("A", "B", "C")


@dataclass(frozen=True)
class TrackSpeeds:
    """Linear speeds of the three tracks at the sprockets, mm/s."""

    v_a: float
    v_b: float
    v_c: float
    source: str  # "theoretical" or "resolved"

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.v_a, self.v_b, self.v_c)

    @property
    def mean(self) -> float:
        return math.fsum(self.as_tuple()) / 3.0


@dataclass(frozen=True)
class SlipReport:
    """Per-track deviation of resolved from geometry-required speed."""

    slips: tuple[float, float, float]  # mm/s, absolute
    apes: tuple[float | None, float | None, float | None]  # percent; None when undefined


def theoretical_speeds(
    segment: Segment, theta: float, v_nominal: float, contact_radius: float
) -> TrackSpeeds:
    """Speeds the pipe geometry requires of each track.

    Straight: every track moves at ``v_nominal``.  Bend: track i moves at
    ``v_nominal * rho_i / R``, so the mean over the three tracks is
    ``v_nominal`` for every orientation.
    """
    if isinstance(segment, Straight):
        values = (v_nominal, v_nominal, v_nominal)
    else:
        values = tuple(
            v_nominal * module_path_radius(segment, theta, i, contact_radius) / segment.radius
            for i in range(3)
        )
    return TrackSpeeds(*values, source="theoretical")


def resolved_speeds(
    gear: GearTrainConfig,
    robot: RobotConfig,
    segment: Segment,
    theta: float,
    omega_u: float,
    contact_radius: float | None = None,
) -> TrackSpeeds:
    """Track speeds after the differential distributes the input.

    The wall imposes each track's contact-path speed as a per-output speed
    constraint; the train honors them whenever they respect its speed-sum
    budget, which the bend geometry guarantees.  In steady state within a
    segment this equals ``theoretical_speeds`` with
    ``v_nominal = ratio * omega_u * sprocket_radius``.

    ``contact_radius`` defaults to the robot's nominal body radius (the
    wall radius of the reference fit).
    """
    r_c = robot.nominal_body_radius if contact_radius is None else contact_radius
    v_nominal = gear.ratio * omega_u * robot.sprocket_radius
    demanded = theoretical_speeds(segment, theta, v_nominal, r_c)
    loads = LoadState(
        tuple(imposed_speed(v / robot.sprocket_radius) for v in demanded.as_tuple())
    )
    solution = solve_output_speeds(gear, omega_u, loads)
    values = tuple(w * robot.sprocket_radius for w in solution.as_tuple())
    return TrackSpeeds(*values, source="resolved")


def slip_and_ape(resolved: TrackSpeeds, theoretical: TrackSpeeds) -> SlipReport:
    """Per-track slip (mm/s) and absolute percentage error.

    APE is undefined (None) on a track whose theoretical speed is zero
    while its resolved speed is not; slip is still reported there.
    """
    slips = []
    apes = []
    for v_res, v_theo in zip(resolved.as_tuple(), theoretical.as_tuple()):
        slip = abs(v_res - v_theo)
        slips.append(slip)
        if slip == 0.0:
            apes.append(0.0)
        elif v_theo == 0.0:
            apes.append(None)
        else:
            apes.append(100.0 * slip / abs(v_theo))
    return SlipReport(tuple(slips), tuple(apes))


def apply_disturbance(speeds: TrackSpeeds, amplitude: float, rng) -> TrackSpeeds:
    """Multiply each track speed by ``1 + amplitude * u`` with u ~ U(-1, 1).

    Draws exactly three samples from ``rng`` (a numpy Generator); with zero
    amplitude the input is returned untouched and nothing is drawn.
    """
    if amplitude == 0.0:
        return speeds
    factors = rng.uniform(-1.0, 1.0, size=3)
    values = tuple(
        v * (1.0 + amplitude * float(f)) for v, f in zip(speeds.as_tuple(), factors)
    )
    return TrackSpeeds(*values, source=speeds.source)
