import os

# Set DRSUBMAX_DISABLE_NUMBA=1 to force the pure-numpy kernels.
DISABLE_NUMBA = os.getenv("DRSUBMAX_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

# Cache compiled kernels on disk between interpreter runs.
NUMBA_CACHE = os.getenv("DRSUBMAX_NUMBA_CACHE", "1").lower() in ("1", "true", "yes")
