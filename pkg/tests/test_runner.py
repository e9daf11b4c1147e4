"""
Tests for the SweepRunner class.
"""
import os
import threading
import time

import pytest
from pyaircomp.errors import ConfigError
from pyaircomp.experiment import read_csv
from pyaircomp.runner import SweepRunner


class TestSweepRunner:
    """Test suite for the SweepRunner class."""

    def test_run(self, config_file, temp_dir):
        """Test a single run from a config file."""
        out = os.path.join(temp_dir, "out.csv")
        runner = SweepRunner(config_file, out)
        records = runner.run()

        assert runner.runs == 1
        assert runner.last_records == records
        assert len(records) == 4
        assert len(read_csv(out)) == 4

    def test_overrides(self, config_file, temp_dir):
        """Test that overrides take precedence over the file."""
        runner = SweepRunner(config_file, os.path.join(temp_dir, "out.csv"), overrides={"trials": 2})
        records = runner.run()

        assert all(record.trials == 2 for record in records)

    def test_unknown_method(self, temp_dir):
        """Test that methods are checked against the registry on load."""
        path = os.path.join(temp_dir, "bad.yaml")
        with open(path, "w") as f:
            f.write("methods: [OFDM]\n")

        with pytest.raises(ConfigError):
            SweepRunner(path, os.path.join(temp_dir, "out.csv")).load()

    def test_context_manager(self, config_file, temp_dir):
        """Test that leaving the context stops the runner."""
        with SweepRunner(config_file, os.path.join(temp_dir, "out.csv")) as runner:
            runner.enable_watching()
            assert runner.watcher is not None

        assert runner.watcher is None
        assert runner.wait(0)

    def test_rerun_on_change(self, config_file, temp_dir):
        """Test that editing the config re-runs the sweep."""
        out = os.path.join(temp_dir, "out.csv")
        rerun = threading.Event()

        with SweepRunner(config_file, out) as runner:
            runner.run()
            runner.enable_watching(callback=lambda records: rerun.set())
            time.sleep(0.2)
            with open(config_file, "a") as f:
                f.write("master_seed: 11\n")
            assert rerun.wait(10.0), "Sweep was not re-run after the config changed"

        assert runner.runs >= 2
        with open(out) as f:
            assert "# master_seed=11\n" in f.readlines()

    def test_failed_rerun_keeps_results(self, config_file, temp_dir):
        """Test that an invalid edit is logged and the runner keeps going."""
        out = os.path.join(temp_dir, "out.csv")
        runner = SweepRunner(config_file, out)
        runner.run()
        with open(config_file, "w") as f:
            f.write("K: -1\n")

        runner.enable_watching()
        try:
            runner.watcher._on_any_event(_modified(config_file))
        finally:
            runner.stop()

        assert runner.runs == 1
        assert len(read_csv(out)) == 4


def _modified(path):
    from watchdog.events import FileModifiedEvent

    return FileModifiedEvent(os.path.abspath(path))
