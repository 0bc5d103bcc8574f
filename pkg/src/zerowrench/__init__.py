"""Zero-wrench insertion control: task-space dynamics, disturbance
observers, penalty contact and passivity instrumentation for a planar
arm pressing a peg into a chamfered slot.
"""
from .contact_env import (
    CommandPulse,
    HoleGeometry,
    SafetyStop,
    SimConfig,
    Trace,
    World,
    contact_details,
    contact_wrench,
)
from .filters import (
    CompositeAccelFilter,
    CompositeFilter,
    CompositeWrenchFilter,
    FilteredDiff,
    FilterParams,
    LowPass,
    StreamRateMismatch,
    insertion_composite,
)
from .harness import (
    CONTROLLER_NAMES,
    ComparisonReport,
    ConfigInvalid,
    IncompatibleScenarios,
    RunResult,
    Scenario,
    SweepReport,
    SweepSpec,
    compare_controllers,
    default_misalignments,
    hole_nominal,
    hole_tight,
    load_config,
    misalignment_sweep,
    preset_scenario,
    run_scenario,
    save_config,
    three_link_desk,
    two_link_unit,
)
from .observers import (
    CWDOBController,
    DWDOBController,
    DimensionMismatch,
    InertiaModel,
    MismatchConfig,
    PDController,
    PdGains,
    dwdob_residual,
    pd_wrench,
    standard_gains,
)
from .passivity import (
    EnergyLedger,
    NotPositiveDefinite,
    SafetyLimits,
    safety_check,
    split_wrench,
    storage,
)
from .rigid_body import (
    JointState,
    ManipulatorModel,
    SingularTaskInertia,
    TaskState,
    bias_wrench,
    forward_dynamics,
    forward_kinematics,
    jacobian,
    jacobian_dot,
    joint_bias,
    mass_matrix,
    task_inertia,
    task_velocity,
    total_energy,
)

__version__ = "0.1.0"

__all__ = [
    "CommandPulse", "HoleGeometry", "SafetyStop", "SimConfig", "Trace",
    "World", "contact_details", "contact_wrench",
    "CompositeAccelFilter", "CompositeFilter", "CompositeWrenchFilter",
    "FilteredDiff", "FilterParams", "LowPass", "StreamRateMismatch",
    "insertion_composite",
    "CONTROLLER_NAMES", "ComparisonReport", "ConfigInvalid",
    "IncompatibleScenarios", "RunResult", "Scenario", "SweepReport",
    "SweepSpec", "compare_controllers", "default_misalignments",
    "hole_nominal", "hole_tight", "load_config", "misalignment_sweep",
    "preset_scenario", "run_scenario", "save_config", "three_link_desk",
    "two_link_unit",
    "CWDOBController", "DWDOBController", "DimensionMismatch",
    "InertiaModel", "MismatchConfig", "PDController", "PdGains",
    "dwdob_residual", "pd_wrench", "standard_gains",
    "EnergyLedger", "NotPositiveDefinite", "SafetyLimits", "safety_check",
    "split_wrench", "storage",
    "JointState", "ManipulatorModel", "SingularTaskInertia", "TaskState",
    "bias_wrench", "forward_dynamics", "forward_kinematics", "jacobian",
    "jacobian_dot", "joint_bias", "mass_matrix", "task_inertia",
    "task_velocity", "total_energy",
]
