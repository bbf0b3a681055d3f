import os
from dotenv import load_dotenv

# Load environment variables from .env if present
load_dotenv()


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e


# Coset enumeration: cosets alive at once before declaring overflow
MAX_COSETS = _int_env("PGROUP_MAX_COSETS", 2 ** 16)

# Largest group order we are willing to hold as a dense table
TABLE_CAP = _int_env("PGROUP_TABLE_CAP", 4096)

# Up to this order every O(n^3) / dual-method self-check runs in full
FULL_CHECK_LIMIT = _int_env("PGROUP_FULL_CHECK_LIMIT", 512)

# Above FULL_CHECK_LIMIT associativity is sampled (seeded, so reproducible)
ASSOC_SAMPLES = _int_env("PGROUP_ASSOC_SAMPLES", 100_000)
SEED = _int_env("PGROUP_SEED", 0)

# Brute-force Aut(G) oracle is only meant for tiny groups
ORACLE_MAX_ORDER = _int_env("PGROUP_ORACLE_MAX_ORDER", 16)

# Where structure reports are memoized (empty = no cache)
CACHE_DIR = os.getenv("PGROUP_CACHE_DIR", "")

# Worker processes for automorphism search and database scans
JOBS = _int_env("PGROUP_JOBS", 1)

LOG_LEVEL = os.getenv("PGROUP_LOG_LEVEL", "WARNING")

# Bundled corpus (think of it as the default group database)
CORPUS_DIR = os.getenv(
    "PGROUP_CORPUS_DIR",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus"),
)

# Aut_z is only enumerated when |Hom(G/G', Z(G))| stays at or below this
CENTRAL_ENUM_LIMIT = _int_env("PGROUP_CENTRAL_ENUM_LIMIT", 4096)
