"""
Runtime configuration read from the environment (and a local .env file).
"""

import os

from dotenv import load_dotenv

load_dotenv()  # Loads variables from .env into environment

# Size caps for the exhaustive procedures
EXHAUSTIVE_ATOM_CAP = int(os.getenv("HEXUFS_EXHAUSTIVE_CAP", "24"))
UFS_DOMAIN_CAP = int(os.getenv("HEXUFS_UFS_DOMAIN_CAP", "20"))
FLP_ATOM_CAP = int(os.getenv("HEXUFS_FLP_CAP", "20"))

DEFAULT_ENGINE = os.getenv("HEXUFS_DEFAULT_ENGINE", "propagate")
DEFAULT_MODE = os.getenv("HEXUFS_DEFAULT_MODE", "full")

LOG_LEVEL = os.getenv("HEXUFS_LOG_LEVEL", "INFO")

# Reserved prefixes of external replacement atoms in the guessing program
REPLACEMENT_PREFIX = "__e_"
COMPANION_PREFIX = "__ne_"

# Prefix of the fresh atoms standing in for classically negated atoms
STRONG_NEGATION_PREFIX = "neg_"
