"""Dual-quaternion pose-following control of a single rigid body.

Simulates a fully actuated rigid body steered along a geometrically
parameterized pose reference with self-regulated progress, including the
screw-algebra layer, the exact feedforward/PD control law, reference
curves, a deterministic closed-loop engine, and experiment presets.
"""

from ._accel import JIT_ENABLED
from .errors import (
    AngleOutOfRange,
    ConfigInvalid,
    InsufficientSamples,
    InvalidGains,
    MissingColumn,
    NonFiniteState,
    NonMonotonicTheta,
    NonUnitDualQuaternion,
    NonUnitRotation,
    PoseFollowError,
    SchemaMismatch,
    ThetaOutOfRange,
    UnknownVariant,
)

__version__ = "0.1.0"

__all__ = [
    "JIT_ENABLED",
    "PoseFollowError",
    "NonUnitRotation",
    "NonUnitDualQuaternion",
    "AngleOutOfRange",
    "NonFiniteState",
    "ThetaOutOfRange",
    "InsufficientSamples",
    "NonMonotonicTheta",
    "ConfigInvalid",
    "InvalidGains",
    "UnknownVariant",
    "SchemaMismatch",
    "MissingColumn",
    "__version__",
]
