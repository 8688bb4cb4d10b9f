"""Single-input, three-output differential gear train.

The train couples one input shaft to three outputs through three two-output
bevel differentials arranged in a cycle: unit i's right side gear is joined
to unit (i+1)'s left side gear, and each joined pair drives one output.
Every ring gear is driven at ``ratio * omega_u`` and a ring's speed is the
arithmetic mean of its two side gears' speeds, so summing the three ring
relations over the coupled pairs pins down only the total of the output
speeds:

    omega_A + omega_B + omega_C = 3 * ratio * omega_u

Within that budget the outputs float with load: free or equally loaded
outputs turn together, externally imposed speeds are honored verbatim, and
unequal torque loads shift speed away from the harder-pressed output.  All
types are immutable values and every operation is a pure function, so the
module is safe to call from any number of threads.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InfeasibleConstraintError

# Relative tolerance separating genuinely conflicting imposed speeds from
# float noise.
FEASIBILITY_RTOL = 1e-6


class LoadKind(Enum):
    """How one output of the train is constrained."""

    FREE = "free"
    SPEED = "speed"
    TORQUE = "torque"


@dataclass(frozen=True)
class OutputLoad:
    """Constraint on a single output: free, held at a speed, or torque-loaded."""

    kind: LoadKind
    value: float = 0.0  # rad/s for SPEED, N*mm for TORQUE, unused for FREE

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"load value must be finite, got {self.value!r}")


def free() -> OutputLoad:
    return OutputLoad(LoadKind.FREE)


def imposed_speed(omega: float) -> OutputLoad:
    return OutputLoad(LoadKind.SPEED, float(omega))


def imposed_torque(tau: float) -> OutputLoad:
    return OutputLoad(LoadKind.TORQUE, float(tau))


@dataclass(frozen=True)
class LoadState:
    """Per-output constraints for one speed solve.

    All three outputs may carry imposed speeds only when they are mutually
    consistent with the sum relation; consistency is checked at solve time.
    """

    loads: tuple[OutputLoad, OutputLoad, OutputLoad]

    def __post_init__(self):
        if len(self.loads) != 3:
            raise ValueError("exactly three output loads required")
        for load in self.loads:
            if not isinstance(load, OutputLoad):
                raise ValueError(f"not an OutputLoad: {load!r}")

    @classmethod
    def all_free(cls) -> "LoadState":
        return cls((free(), free(), free()))

    @classmethod
    def equal_torques(cls, tau: float) -> "LoadState":
        return cls((imposed_torque(tau),) * 3)


@dataclass(frozen=True)
class GearTrainConfig:
    """Ratio and coupling topology of the three-output differential.

    ``ratio`` is the input-to-ring speed ratio: each ring gear turns at
    ``ratio * omega_u``.  The published source never states the numeric
    value, so it defaults to 1 and every relation is ratio-parametric.
    """

    ratio: float = 1.0
    num_outputs: int = 3

    def __post_init__(self):
        if not (math.isfinite(self.ratio) and self.ratio > 0.0):
            raise ValueError(f"gear ratio must be finite and positive, got {self.ratio!r}")
        if self.num_outputs != 3:
            raise ValueError("the train has exactly three outputs")

    def coupled_pairs(self) -> tuple[tuple[tuple[int, str], tuple[int, str]], ...]:
        """Cyclic side-gear coupling; pair k feeds output k.

        Each entry is ((unit, side), (unit, side)): unit i's right side gear
        is locked to unit (i+1)%3's left side gear.
        """
        return tuple(((i, "right"), ((i + 1) % 3, "left")) for i in range(3))


@dataclass(frozen=True)
class SpeedSolution:
    """Resolved output speeds and the leftover sum-constraint violation."""

    omega_a: float  # rad/s
    omega_b: float
    omega_c: float
    residual: float  # rad/s, |omega_a + omega_b + omega_c - 3*ratio*omega_u|

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega_a, self.omega_b, self.omega_c)


@dataclass(frozen=True)
class TorqueSolution:
    """Equal output torque split of the lossless open differential."""

    tau_a: float  # N*mm
    tau_b: float
    tau_c: float
    tau_input_reflected: float  # N*mm, input torque implied by the outputs

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.tau_a, self.tau_b, self.tau_c)


def ring_speed(omega_side_left: float, omega_side_right: float) -> float:
    """Ring gear speed of one two-output unit: the mean of its side gears."""
    if not (math.isfinite(omega_side_left) and math.isfinite(omega_side_right)):
        raise ValueError("side gear speeds must be finite")
    return (omega_side_left + omega_side_right) / 2.0


def solve_output_speeds(cfg: GearTrainConfig, omega_u: float, loads: LoadState) -> SpeedSolution:
    """Distribute the speed budget ``3 * ratio * omega_u`` over the outputs.

    Imposed speeds are honored exactly.  The remaining outputs share the
    leftover budget equally, except that unequal torque loads route speed
    away from the harder-pressed output in proportion to its normalized
    load deviation (the source only states this behavior qualitatively, so
    the proportional rule is the deterministic model used here):

        omega_i = v_mean * (1 - (tau_i - tau_mean) / max|tau|)

    Free outputs carry no deviation.  Aggregates use exactly rounded sums,
    which makes the solution bit-identical under relabeling of the outputs.

    Raises:
        InfeasibleConstraintError: all three speeds are imposed and they
            miss the sum budget by more than ``FEASIBILITY_RTOL`` relative.
    """
    if not math.isfinite(omega_u):
        raise ValueError("input speed must be finite")
    target = 3.0 * cfg.ratio * omega_u
    entries = loads.loads
    speed_idx = [i for i in range(3) if entries[i].kind is LoadKind.SPEED]
    open_idx = [i for i in range(3) if entries[i].kind is not LoadKind.SPEED]

    result = [0.0, 0.0, 0.0]
    for i in speed_idx:
        result[i] = entries[i].value

    if not open_idx:
        total = math.fsum(result)
        if abs(total - target) > FEASIBILITY_RTOL * max(1.0, abs(target)):
            raise InfeasibleConstraintError(
                f"imposed speeds sum to {total:g} rad/s but the train requires "
                f"{target:g} rad/s (3 * ratio * omega_u)"
            )
    else:
        torque_vals = [entries[i].value for i in open_idx if entries[i].kind is LoadKind.TORQUE]
        scale = max((abs(t) for t in torque_vals), default=0.0)
        uniform = scale == 0.0 or all(t == torque_vals[0] for t in torque_vals)
        if not speed_idx and uniform:
            # Equal loads on every output: exactly the common ring speed.
            base = cfg.ratio * omega_u
            result = [base, base, base]
        else:
            budget = target - math.fsum(entries[i].value for i in speed_idx)
            v_mean = budget / len(open_idx)
            tau_mean = math.fsum(torque_vals) / len(torque_vals) if torque_vals else 0.0
            for i in open_idx:
                load = entries[i]
                if load.kind is LoadKind.TORQUE and scale > 0.0:
                    deviation = (load.value - tau_mean) / scale
                    result[i] = v_mean * (1.0 - deviation)
                else:
                    result[i] = v_mean

    residual = abs(math.fsum(result) - target)
    return SpeedSolution(result[0], result[1], result[2], residual)


def solve_output_torques(cfg: GearTrainConfig, tau_input: float) -> TorqueSolution:
    """Split the input torque equally over the outputs (lossless model).

    Each output receives ``ratio * tau_input / 3``; reflecting the output
    sum back through the ratio recovers ``tau_input``.
    """
    if not math.isfinite(tau_input):
        raise ValueError("input torque must be finite")
    tau = cfg.ratio * tau_input / 3.0
    reflected = math.fsum((tau, tau, tau)) / cfg.ratio
    return TorqueSolution(tau, tau, tau, reflected)


def constraint_residual(
    cfg: GearTrainConfig, omega_u: float, speeds: tuple[float, float, float]
) -> float:
    """Absolute violation of the speed-sum relation for candidate speeds."""
    if not math.isfinite(omega_u) or not all(math.isfinite(w) for w in speeds):
        raise ValueError("speeds and input speed must be finite")
    return abs(math.fsum(speeds) - 3.0 * cfg.ratio * omega_u)
