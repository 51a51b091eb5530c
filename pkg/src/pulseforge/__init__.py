"""pulseforge: inverse-engineered tunneling/spin-orbit pulse schedules for a
four-level double-quantum-dot spin qubit, verified by direct integration."""

from .dqd import (
    ControlSample,
    DiamondAngles,
    PhaseFrame,
    SystemParams,
    analytic_propagator,
    basis_state,
    check_normalized,
    controls_from_angles,
    full_hamiltonian,
    general_hamiltonian_check,
    h0_matrix,
    left_qubit_state,
    propagator_matrix,
    right_qubit_state,
)
from .errors import (
    DegeneratePhaseError,
    InfeasibleAmplitudeError,
    InfeasibleTargetError,
    IntegrationError,
    InvalidAnsatzError,
    NoFeasibleTimeError,
    PlanError,
    PulseforgeError,
    ScheduleFormatError,
    UnsupportedComparisonError,
    VerificationError,
)
from .propagate import (
    FidelityTrace,
    TimeGrid,
    Trajectory,
    compare_analytic,
    fidelity_trace,
    integrate,
)
from .quat4d import (
    Rotation4,
    SphericalAngles,
    UnitQuaternion,
    left_isoclinic,
    quat_from_angles,
    right_isoclinic,
    rotation_from_pair,
)
from .synth import (
    AnsatzSpec,
    ControlSchedule,
    GateSpec,
    NotGateSpec,
    PhaseGateSpec,
    PrepareSpec,
    ScheduleMeta,
    TransportSpec,
    build_schedule,
    declared_target,
    gamma_ansatz,
    initial_state,
    operation_time,
    schedule_from_angles,
    solve_theta,
    synthesize_gate,
    synthesize_preparation,
    transport_amplitudes,
    zeta_phases,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
