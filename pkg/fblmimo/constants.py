from enum import Enum, unique


@unique
class MC_TARGET(Enum):
    # ---------- Rate functionals ----------#

    # * C(H), bits per channel use #
    CAPACITY = "capacity"
    # * V(H) #
    DISPERSION = "dispersion"
    # * sqrt(V(H)), for the Jensen check #
    SQRT_DISPERSION = "sqrt-dispersion"
    # * (sum_j 1/(1 + rho*lambda_j/M)^2)^2 #
    DISPERSION_SECOND_MOMENT = "dispersion-second-moment"

    # ---------- Eigenvalue functionals ----------#

    # * sum_i 1/lambda_i #
    INV_EIGEN_SUM = "inv-eigen-sum"
    # * sum_i 1/(2M/rho + lambda_i) #
    SHIFTED_INV_SUM = "shifted-inv-sum"
    # * sum_i 1/lambda_i^2 #
    INV_EIGEN_SQ_SUM = "inv-eigen-sq-sum"
    # * sum_{i != j} 1/(lambda_i lambda_j) #
    INV_EIGEN_CROSS_SUM = "inv-eigen-cross-sum"

    # ---------- Variance expansion terms, (M/2rho)^2 included ----------#

    G1 = "g1"
    G2 = "g2"
    G3 = "g3"
    G4 = "g4"


# targets that divide by an eigenvalue and therefore reject near-singular draws
INVERSE_TARGETS = frozenset({
    MC_TARGET.INV_EIGEN_SUM,
    MC_TARGET.INV_EIGEN_SQ_SUM,
    MC_TARGET.INV_EIGEN_CROSS_SUM,
    MC_TARGET.G1,
    MC_TARGET.G2,
    MC_TARGET.G3,
})


@unique
class STAT_METHOD(Enum):
    CLOSED_FORM = "closed-form"
    LOWER_BOUND = "lower-bound"
    HIGH_SNR = "high-snr"
    MONTE_CARLO = "monte-carlo"


@unique
class RATE_METHOD(Enum):
    NORMAL_APPROX = "normal-approx"
    HIGH_SNR = "high-snr"


@unique
class SWEEP_METHOD(Enum):
    CLOSED = "closed"
    HIGH_SNR = "high-snr"
    MC = "mc"
    BOTH = "both"


@unique
class SWEEP_QUANTITY(Enum):
    SHIFTED_INV_SUM = "shifted-inv-sum"
    DISPERSION_BOUND = "dispersion-bound"
    DISPERSION_MEAN = "dispersion-mean"
    DISPERSION_VAR = "dispersion-var"
    CAPACITY_MEAN = "capacity-mean"
    RATE_BOUND = "rate-bound"
    BLOCKLENGTH = "blocklength"


SWEEP_VARIABLES = ("M", "N", "m", "rho_db", "n")

# ---------- Monte-Carlo ----------#

# trials per RNG block; trial k lives in block k // BLOCK_SIZE
BLOCK_SIZE = 1000
# complex entries generated per chunk inside a block
CHUNK_ENTRIES = 2 ** 18
# draws with lambda_min < REJECTION_RATIO * lambda_max are rejected for inverse targets
REJECTION_RATIO = 1e-12
MAX_REJECTION_RATE = 0.01
# eigenvalues below -NEGATIVE_EIGEN_TOL * lambda_max are an error, above it they are clamped
NEGATIVE_EIGEN_TOL = 1e-10
CONFIDENCE_SE = 3.0
AGREEMENT_REL_TOL = 0.02
# variance closed forms rest on an independence assumption
VARIANCE_REL_TOL = 0.25

# ---------- Emendation parameters ----------#

# snr_db -> (psi, xi), the only calibrated points
EMENDATION_TABLE = {
    5.0: (1.41, 0.5),
    7.0: (1.29, 0.6),
}
EMENDATION_DB_TOL = 1e-9

# ---------- Output ----------#

SIGNIFICANT_DIGITS = 12
