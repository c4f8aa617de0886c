"""Constants for harmonic morphism checks on metric Lie algebras."""

DEFAULT_TOLERANCE = 1e-9

# Above this Jacobi residual the theorem checks are not reported.
UNSOUND_JACOBI = 1e-6

# Relative singular value threshold for rank and kernel decisions.
RANK_RCOND = 1e-8

# Eigenvalues chained closer than this (relative) belong to the same root.
ROOT_CLUSTER = 1e-5
ROOT_RETRIES = 5
NORMALITY_SAMPLES = 20

FD_STEP = 1e-5
ASCENT_STARTS = 5
ASCENT_ITERATIONS = 200
DEFAULT_BUDGET = 10_000
DEFAULT_SEED = 0

VARIETY_SAMPLES = 200
VARIETY_ATTEMPTS = 50

SCHEMA_VERSION = 1

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_INFO = "info"

COND_JACOBI = "jacobi"
COND_A_SUBALGEBRA = "a-subalgebra"
COND_I = "i"
COND_II = "ii"
COND_III = "iii"
COND_IV = "iv"
COND_V = "v"
COND_IV_V = "iv+v"
COND_VI = "vi"
COND_VII = "vii"
COND_I_CONFORMAL = "i-conformal"
COND_THEOREM = "theorem"
