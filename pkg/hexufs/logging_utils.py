"""
Logging utilities for the hexufs evaluator.

Provides the console/file logger used by the command-line tool and the
reporting helpers the pipeline logs its progress with.
"""

import datetime
import logging
from typing import Any, Dict, List, Optional

from hexufs import config


def setup_solver_logger(log_file_path: Optional[str] = None, level: str = config.LOG_LEVEL) -> logging.Logger:
    """
    Set up the package logger: console output and, optionally, a log file.

    Args:
        log_file_path (str, optional): Path to a log file
        level (str): Log level name

    Returns:
        logging.Logger: Configured logger
    """
    logger = logging.getLogger("hexufs")
    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))

    if logger.handlers:
        logger.handlers = []

    # Console: messages only, on stderr so answer sets stay clean on stdout
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter('%(message)s'))
    logger.addHandler(console_handler)

    if log_file_path:
        file_handler = logging.FileHandler(log_file_path)
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger


def log_evaluation_start(logger: logging.Logger, rules: int, atoms: int, mode: str, engine: str) -> None:
    """
    Log evaluation start information.

    Args:
        logger (logging.Logger): Logger to use
        rules (int): Number of ground rules
        atoms (int): Number of ordinary atoms
        mode (str): Evaluation mode
        engine (str): Answer-set engine
    """
    logger.info(f"Evaluation started at: {datetime.datetime.now()}")
    logger.info(f"Program: {rules} rules, {atoms} atoms")
    logger.info(f"Mode: {mode}, engine: {engine}")


def log_candidate(logger: logging.Logger, index: int, candidate: str, accepted: bool,
                  witness: Optional[str] = None) -> None:
    if accepted:
        logger.debug(f"  Candidate #{index} {candidate}: answer set")
    else:
        logger.debug(f"  Candidate #{index} {candidate}: rejected by unfounded set {witness}")


def log_ufs_result(logger: logging.Logger, scope: str, witness: Optional[str], expansions: int) -> None:
    """
    Log the outcome of one unfounded-set search.

    Args:
        logger (logging.Logger): Logger to use
        scope (str): Searched component
        witness (str, optional): Unfounded set found, if any
        expansions (int): Search-node expansions spent
    """
    outcome = f"found {witness}" if witness else "none"
    logger.debug(f"    UFS search in {scope}: {outcome} ({expansions} expansions)")


def log_evaluation_statistics(logger: logging.Logger, stats: Dict[str, Any]) -> None:
    """
    Log the counters of an evaluation report.

    Args:
        logger (logging.Logger): Logger to use
        stats (dict): Flat statistics of the report
    """
    logger.info("=" * 50)
    logger.info("Evaluation Statistics:")
    for key in ("answer_sets", "compatible_sets", "candidates_rejected", "ufs_searches_run",
                "ufs_searches_skipped", "components_total", "components_ecyclic",
                "search_node_expansions"):
        logger.info(f"  {key}: {stats.get(key)}")
    for phase, ms in stats.get("phase_times_ms", {}).items():
        logger.info(f"  {phase}: {ms:.1f} ms")
    logger.info("=" * 50)


def log_verification_results(logger: logging.Logger, checked: int, discrepancies: List[str]) -> None:
    """
    Log verification results.

    Args:
        logger (logging.Logger): Logger to use
        checked (int): Number of programs verified
        discrepancies (list): Discrepancy descriptions
    """
    logger.info(f"Verified {checked} program(s)")
    if discrepancies:
        logger.error(f"  {len(discrepancies)} discrepancies:")
        for line in discrepancies:
            logger.error(f"    {line}")
    else:
        logger.info("  No discrepancies between full and brute mode.")


def log_benchmark_row(logger: logging.Logger, row: Dict[str, Any]) -> None:
    logger.info(
        f"  {row['mode']:<18} answer_sets={row['answer_sets']} ufs_run={row['ufs_searches_run']} "
        f"expansions={row['search_node_expansions']} total={row['total_ms']:.1f} ms"
    )


def log_completion(logger: logging.Logger, elapsed_ms: float) -> None:
    logger.info(f"Completed in {elapsed_ms:.1f} ms at {datetime.datetime.now()}")
