"""Centralized numeric tolerances.

Values baked into jitted kernels (SMALL_ANGLE, the unit-input guards) are
compile-time constants; run-level tolerances (convergence band, sustain
window, virtual-input saturation) have config-file overrides in `sim`.
"""

import math

# series branch switch for the screw log/exp, in rad of rotation magnitude
SMALL_ANGLE = 1e-6

# guard thresholds; inputs farther from unit than this raise
UNIT_ROTATION_TOL = 1e-6
UNIT_DQ_TOL = 1e-6

# screw exponential domain: rotation magnitude strictly below 2*pi,
# i.e. log-vector real part strictly below pi
EXP_REAL_LIMIT = math.pi

# closed-loop run defaults (overridable per config)
CONVERGENCE_TOL = 1e-3
CONVERGENCE_SUSTAIN_S = 1.0
THETA_DDOT_LIMIT = 10.0
