"""
Configuration Module
Tolerances, seeds and logging setup, overridable from the environment or a .env file.
"""

import os
import logging

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_float(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


# Validator tolerance shared by every correlation check
VALIDATE_TOL = _env_float("CORRGRAPH_TOL", 1e-9)

# Eigenvalue tolerance for PSD decisions
PSD_TOL = _env_float("CORRGRAPH_PSD_TOL", 1e-9)

# Dykstra residual tolerance and iteration cap
FEASIBILITY_TOL = _env_float("CORRGRAPH_FEASIBILITY_TOL", 1e-7)
DYKSTRA_MAX_ITER = _env_int("CORRGRAPH_DYKSTRA_MAX_ITER", 50000)

# Absolute tolerance on s when bisecting for f_vect
BISECTION_TOL = _env_float("CORRGRAPH_BISECTION_TOL", 1e-8)

# Largest imaginary part tolerated in a trace of complex projections
IMAGINARY_TOL = 1e-12

# Projection search
DEFAULT_SEED = 20240607
SEARCH_RESTARTS = _env_int("CORRGRAPH_RESTARTS", 50)
SEARCH_SUM_TOL = 1e-6

# Curve sampling threads
SAMPLING_WORKERS = _env_int("CORRGRAPH_WORKERS", 1)

LOG_LEVEL = os.getenv("CORRGRAPH_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_seed(cli_value=None):
    """
    Resolve the effective seed.

    CORRGRAPH_SEED in the environment wins over the command-line value,
    which wins over DEFAULT_SEED.
    """
    env_seed = os.getenv("CORRGRAPH_SEED")
    if env_seed is not None and env_seed.strip() != "":
        try:
            return int(env_seed)
        except ValueError:
            raise ValueError(f"CORRGRAPH_SEED must be an integer, got {env_seed!r}")
    if cli_value is not None:
        return int(cli_value)
    return DEFAULT_SEED


def setup_logging(level=None):
    """Configure a single stderr handler for the whole package."""
    level_name = (level or LOG_LEVEL).upper()
    numeric = logging.getLevelName(level_name)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level_name}")
    logging.basicConfig(level=numeric, format=LOG_FORMAT, force=True)
