"""Exception types raised by the public API.

Kernel-level checks raise these directly (numba supports exceptions with
constant messages); wrappers re-raise with context where useful.
"""


class PoseFollowError(Exception):
    """Base class for all package errors."""


class NonUnitRotation(PoseFollowError):
    """Rotation quaternion norm deviates from 1 beyond tolerance."""


class NonUnitDualQuaternion(PoseFollowError):
    """Dual quaternion violates the unit constraints beyond tolerance."""


class AngleOutOfRange(PoseFollowError):
    """Screw exponential asked for a rotation magnitude >= pi."""


class NonFiniteState(PoseFollowError):
    """NaN or Inf appeared in an integrated state."""


class ThetaOutOfRange(PoseFollowError):
    """Path parameter outside the reference's domain."""


class InsufficientSamples(PoseFollowError):
    """Spline reference needs at least four samples."""


class NonMonotonicTheta(PoseFollowError):
    """Spline reference samples must have strictly increasing theta."""


class ConfigInvalid(PoseFollowError):
    """Run configuration failed validation."""


class InvalidGains(PoseFollowError):
    """Controller gains violate their positivity/structure constraints."""


class UnknownVariant(PoseFollowError):
    """Unrecognized preset, reference kind, profile kind, or mode name."""


class SchemaMismatch(PoseFollowError):
    """Versioned input file declares an unsupported schema version."""


class MissingColumn(PoseFollowError):
    """A consumer asked for a CSV column that is not present."""
