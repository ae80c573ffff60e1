"""
hexufs: a ground HEX-program evaluator.

Answer sets are computed by guessing external atom values, checking the
guesses against the oracles, and confirming minimality with unfounded-set
searches that a syntactic criterion and an SCC decomposition keep small.
"""

from hexufs.errors import HexError
from hexufs.external_sources import OracleRegistry, default_registry, load_table_oracle
from hexufs.parser import load_program, parse_program
from hexufs.pipeline import EvaluationOptions, EvaluationReport, evaluate, verify

__all__ = [
    "EvaluationOptions",
    "EvaluationReport",
    "HexError",
    "OracleRegistry",
    "default_registry",
    "evaluate",
    "load_program",
    "load_table_oracle",
    "parse_program",
    "verify",
]

__version__ = "0.1.0"
