"""
Default tolerances, step sizes and environment variable names.
"""

import math

# Group membership: ||g*g - 1|| and |det g - 1|
MEMBERSHIP_TOL = 1e-9
EXP_TOL = 1e-12

# alpha(x) counts as singular above this condition number
MAX_FRAME_CONDITION = 1e8

# Numeric derivatives (central differences)
DERIV_STEP = 1e-4
NIJENHUIS_STEP = 1e-3

# Integrators
INTEGRATOR_STEP = 1e-3
INTEGRATOR_MAX_STEPS = 200000
GROUP_NORM_BOUND = 1e12

INTEGRABILITY_TOL = 1e-8
KP_NORM_LIMIT = math.pi

# Period rank decisions (ratio of singular values)
RANK_ONE_RATIO = 1e-12
RANK_TWO_RATIO = 1e-8
PERIOD_RELATION_TOL = 1e-9
PERIOD_RELATION_MAXCOEFF = 1000

LATTICE_CLOSURE_DEPTH = 6

LOG_LEVEL_ENV = "CXBUNDLE_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

DEFAULT_SEED = 0
DEFAULT_POINTS = 100
DEFAULT_PLANES = 8
DEFAULT_TOL = 1e-8

# Verdict thresholds
GEODESIC_RESIDUAL_TOL = 1e-5
SPEED_DRIFT_TOL = 1e-7
NONPOSITIVE_TOL = 1e-12
HISTOGRAM_BINS = 20
