"""Thruster-assisted quadruped walking: reduced-order simulation, an
optimization-free reference governor with friction-cone constraints, PD
thruster attitude control, and two competing ground-force estimators."""

from .attitude import AttitudeGains, allocate_thrusts, attitude_wrench
from .config import SimConfig, load_config
from .contact import GrfSet, GroundParams, grf_all, grf_for_foot
from .dynamics import (
    BodyPose,
    BodyTwist,
    LegId,
    LegJoints,
    ModelParams,
    RobotState,
    Wrench,
    bias_vector,
    dynamics_rhs,
    forward_kinematics,
    foot_velocity_jacobian,
    mass_matrix,
    thruster_wrench,
)
from .estimation import (
    ConstrainedEstimate,
    ObserverState,
    constrained_grf,
    make_observer,
    numeric_mass_matrix_rate,
    observer_step,
    per_foot_forces,
)
from .gait import (
    GaitPlanner,
    GaitSchedule,
    inverse_kinematics,
    joint_command,
    stance_pair,
    swing_foot_target,
    swing_trajectory,
)
from .governor import (
    ErgParams,
    ErgState,
    FrictionConstraint,
    ReferenceGovernor,
    constraint_margin,
    governor_update,
    predicted_grf,
)
from .integrator import rk4_step
from .simulate import ScenarioResult, bench, run_scenario

__version__ = "0.1.0"
