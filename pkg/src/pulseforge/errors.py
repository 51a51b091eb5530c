"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: bad input files and plans
exit 2, infeasible synthesis targets exit 3, verification failures exit 4.
"""


class PulseforgeError(Exception):
    """Base class for all pulseforge errors."""


class InvalidAnsatzError(PulseforgeError):
    """Pulse-shape specification is unusable (e.g. non-positive duration)."""


class InfeasibleTargetError(PulseforgeError):
    """Requested final state cannot be reached by any schedule."""


class InfeasibleAmplitudeError(PulseforgeError):
    """Amplitude pair (A, B) is outside the reachable set for this qubit."""


class NoFeasibleTimeError(PulseforgeError):
    """No operation time satisfies the phase condition within the allowed window."""


class DegeneratePhaseError(PulseforgeError):
    """A phase was requested for an amplitude that vanishes."""


class VerificationError(PulseforgeError):
    """A synthesized schedule failed its internal propagation check."""


class IntegrationError(PulseforgeError):
    """Numerical integration lost accuracy (norm drift beyond tolerance)."""


class UnsupportedComparisonError(PulseforgeError):
    """Schedule lacks the angle metadata needed for an analytic comparison."""


class ScheduleFormatError(PulseforgeError):
    """Schedule file is malformed or missing required header keys."""


class PlanError(PulseforgeError):
    """Plan document is malformed or inconsistent."""
