from importlib.metadata import version

# Action modes.
EXPLORE = "explore"
EXPLOIT = "exploit"
# Comparison schemes.
PROPOSED = "proposed"
RANDOM_MOVE = "random_move"
UNTREATED = "untreated"
NO_COMPRESSION = "no_compression"
CONVENTIONAL = "conventional"
SCHEMES = (PROPOSED, RANDOM_MOVE, UNTREATED, NO_COMPRESSION, CONVENTIONAL)
# Sweep axes.
USERS = "users"
SIGMA = "sigma"
TASK_SIZE = "task_size"
AXES = (USERS, SIGMA, TASK_SIZE)

from . import (  # isort:skip
    agent,
    channel,
    costs,
    environment,
    exceptions,
    harness,
    load_csv,
    mdp,
    neural,
    robustness,
    units,
    utils,
    validation,
)

"""Ignore isort (flake8 Error 402) as we cannot import these modules at the top of the
file as the strings above must be set first or the imports will fail.
"""
__version__ = version("uavmec")
del version

__all__ = [
    "__version__",
    "agent",
    "channel",
    "costs",
    "environment",
    "exceptions",
    "harness",
    "load_csv",
    "mdp",
    "neural",
    "robustness",
    "units",
    "utils",
    "validation",
]
