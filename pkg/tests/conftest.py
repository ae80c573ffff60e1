"""
Pytest configuration and fixtures for hexufs tests
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from hexufs.external_sources import default_registry, parse_table_oracle
from hexufs.parser import load_program
from tests.fixtures.sample_programs import (
    CONCAT_PROGRAM,
    DIFF_PROGRAM,
    EXAMPLE1,
    EXAMPLE3,
    GUARD_ORACLE,
    GUARD_PROGRAM,
    STRONG_NEGATION_PROGRAM,
)

PROGRAMS_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'programs'))


@pytest.fixture
def registry():
    """
    Fixture that provides a registry with the builtin oracles
    """
    return default_registry()


@pytest.fixture
def guard_registry():
    """
    Fixture that provides the builtin oracles plus the guard table oracle
    """
    registry = default_registry()
    registry.register(parse_table_oracle(GUARD_ORACLE).to_spec())
    return registry


@pytest.fixture
def example1(registry):
    return load_program(EXAMPLE1, registry)


@pytest.fixture
def example3(registry):
    return load_program(EXAMPLE3, registry)


@pytest.fixture
def diff_program(registry):
    return load_program(DIFF_PROGRAM, registry)


@pytest.fixture
def concat_program(registry):
    return load_program(CONCAT_PROGRAM, registry)


@pytest.fixture
def guard_program(guard_registry):
    return load_program(GUARD_PROGRAM, guard_registry)


@pytest.fixture
def strong_negation_program(registry):
    return load_program(STRONG_NEGATION_PROGRAM, registry)


@pytest.fixture
def programs_dir():
    """
    Fixture that provides the directory of the example program files
    """
    return PROGRAMS_DIR


@pytest.fixture
def run_db(tmp_path, monkeypatch):
    """
    Fixture that points the run log at a temporary database
    """
    path = str(tmp_path / "test_runs.db")
    monkeypatch.setenv("HEXUFS_DB_PATH", path)
    return path
