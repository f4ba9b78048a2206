"""splitnet constants and enums."""

METHODS = ("DC", "BC", "CC", "Split")
COUPLING_METHODS = {"BC", "CC"}

SPLIT_NORMS = {"raw", "outnorm", "innorm", "binorm"}
RELATEDNESS_NORMS = {"none", "eq1"}

DEFAULT_SPLIT_NORM = "outnorm"
DEFAULT_RELATEDNESS_NORM = "eq1"

DEFAULT_TOP_M = 20
DEFAULT_SEED = 42
MAX_SEED = (1 << 64) - 1

# Resolution grid 0.1 .. 2.0, step 0.1.
DEFAULT_GAMMAS = tuple(round(0.1 * i, 10) for i in range(1, 21))

DEFAULT_MAX_ITERATIONS = 100
DEFAULT_QUALITY_EPSILON = 1e-10
# Temperature of the randomized refinement merge.
REFINE_THETA = 0.01

# Layer suffixes used in split-graph serialization.
CITING_SUFFIX = ":o"
CITED_SUFFIX = ":i"
RESERVED_SUFFIXES = (CITING_SUFFIX, CITED_SUFFIX)

BENCH_WARMUP = 3
BENCH_REPEATS = 5
BENCH_MEAN_REFERENCES = 10
DEFAULT_BENCH_SCALES = (100_000, 200_000, 400_000)

FLOAT_FORMAT = "%.12g"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_CONTRACT = 4
