"""
PyAirComp test fixtures and configuration.
"""
import os
import sys
import tempfile
import shutil
import pytest
import numpy as np

# Add the source directory to the path so tests can import the package
src_path = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, src_path)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing."""
    temp_path = tempfile.mkdtemp()
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def rng():
    """A seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_config():
    """A sweep small enough to run in well under a second."""
    from pyaircomp.config import ExperimentConfig

    return ExperimentConfig(
        K=100,
        L=16,
        methods=["DA", "TBMA-robust"],
        snr_db_list=[30.0],
        attacker_ratio_list=[0.0, 0.2],
        trials=5,
        master_seed=7,
    )


@pytest.fixture
def config_file(temp_dir):
    """
    Write a small sweep definition to a YAML file.

    Returns:
        str: Path to the config file
    """
    path = os.path.join(temp_dir, "sweep.yaml")
    with open(path, "w") as f:
        f.write(
            "K: 100\n"
            "L: 16\n"
            "methods: [DA, tbma_robust]\n"
            "fns: [arithmetic_mean]\n"
            "snr_db_list: [30]\n"
            "attacker_ratio_list: [0, 0.2]\n"
            "trials: 4\n"
            "data_law: GaussianBins(8, 2)\n"
        )
    return path
