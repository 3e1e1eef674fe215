import importlib.util
import os
import sys
from pathlib import Path

import numpy as np
import pytest

REPOSITORY_ROOT = Path(os.path.abspath(__file__)).absolute().parent.parent
sys.path.insert(0, str(REPOSITORY_ROOT))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def cli():
    """The command-line driver module (run_scripts is not a package, so it is loaded from its path)."""
    spec = importlib.util.spec_from_file_location("susyqm_user", REPOSITORY_ROOT / "run_scripts" / "susyqm_user.py")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long sampling runs (deselect with -m \"not slow\")")
