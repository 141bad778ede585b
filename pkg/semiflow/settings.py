"""
Environment configuration for semiflow.
Values are read from the process environment (optionally seeded from a .env file).
"""
import os
import logging

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_TOL = float(os.getenv("SEMIFLOW_TOL", "1e-12"))
DEFAULT_MAX_ITER = int(os.getenv("SEMIFLOW_MAX_ITER", "500"))
DEFAULT_SEED = int(os.getenv("SEMIFLOW_SEED", "7"))
LOG_LEVEL = os.getenv("SEMIFLOW_LOG_LEVEL", "INFO").upper()


def bench_threads() -> int:
    """Worker cap for bench cells, from SEMIFLOW_THREADS (defaults to the CPU count)."""
    fallback = os.cpu_count() or 1
    raw = os.getenv("SEMIFLOW_THREADS")
    if not raw:
        return fallback

    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer SEMIFLOW_THREADS={raw!r}")
        return fallback

    return max(1, value)
