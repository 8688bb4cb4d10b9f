"""Kinematics simulator for a three-track in-pipe climbing robot.

A passive three-output differential drives the tracks: the output speeds
always sum to a fixed multiple of the input speed while individual tracks
float with load.  Inside pipe bends the wall geometry demands per-track
speeds whose mean equals the nominal speed, so the train satisfies them
without slip and without any active control.
"""

from .errors import (
    InfeasibleConstraintError,
    InvalidGeometryError,
    InvalidScenarioError,
    NoFitError,
    PipeClimbError,
    ScenarioParseError,
)
from .geometry import (
    Bend,
    LocatedFrame,
    PipeNetwork,
    PipeSpec,
    Segment,
    Straight,
    Violation,
    locate,
    module_path_radius,
    segment_length,
    total_length,
    validate_network,
)
from .kinematics import (
    SlipReport,
    TrackSpeeds,
    apply_disturbance,
    resolved_speeds,
    slip_and_ape,
    theoretical_speeds,
)
from .report import (
    TRACE_HEADER,
    render_report,
    render_sweep_report,
    render_trace,
    write_trace,
)
from .robot import (
    ModuleState,
    RobotConfig,
    bend_tilts,
    compression_in_bend,
    compression_in_straight,
    contact_radius,
    module_state,
    spring_force,
)
from .scenario import (
    ReportOptions,
    Scenario,
    load_scenario,
    parse_scenario,
    serialize_scenario,
)
from .simulator import (
    DisturbanceConfig,
    RunSummary,
    SegmentSummary,
    SimParams,
    SimState,
    TraceRecord,
    TrackTotals,
    effective_robot_path,
    run,
    run_orientation_sweep,
    step,
)
from .transmission import (
    GearTrainConfig,
    LoadKind,
    LoadState,
    OutputLoad,
    SpeedSolution,
    TorqueSolution,
    constraint_residual,
    free,
    imposed_speed,
    imposed_torque,
    ring_speed,
    solve_output_speeds,
    solve_output_torques,
)

__version__ = "0.1.0"
