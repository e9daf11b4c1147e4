"""
SweepRunner implementation.

This module implements the SweepRunner class that ties a config file, its
overrides, the estimator registry and the optional config watcher together.
"""
import logging
import threading
from typing import Any, Callable, Dict, List, Optional

from .config import ExperimentConfig, apply_overrides, load_config
from .errors import AirCompError
from .experiment import ResultRecord, default_registry, run_sweep
from .file_watcher import ConfigWatcher
from .registry import EstimatorRegistry

logger = logging.getLogger(__name__)


class SweepRunner:
    """
    Runs an NMSE sweep from a config file, and again whenever it changes.

    This class coordinates:
    - Loading the config file and applying command-line overrides
    - Running the sweep and writing the CSV
    - Watching the config file and re-running on change
    """

    def __init__(
        self,
        config_path: str,
        out_path: str,
        overrides: Optional[Dict[str, Any]] = None,
        registry: Optional[EstimatorRegistry] = None,
    ):
        """
        Initialize the SweepRunner.

        Args:
            config_path (str): YAML sweep definition
            out_path (str): CSV destination
            overrides (dict, optional): Config fields that take precedence over the file
            registry (EstimatorRegistry, optional): Method lookup
        """
        self.config_path = config_path
        self.out_path = out_path
        self.overrides = dict(overrides or {})
        self.registry = registry or default_registry()
        self.watcher = None
        self.runs = 0
        self.last_records = None
        self._lock = threading.RLock()
        self._stopped = threading.Event()

    def load(self) -> ExperimentConfig:
        """
        Load the config file and apply the overrides.

        Returns:
            ExperimentConfig: The resolved config

        Raises:
            ConfigError: If the file or an override is invalid
        """
        cfg = apply_overrides(load_config(self.config_path), **self.overrides)
        for method in cfg.methods:
            self.registry.get(method)
        return cfg

    def run(self) -> List[ResultRecord]:
        """
        Load the config and run the sweep once.

        Returns:
            list: The ResultRecords of the sweep
        """
        with self._lock:
            cfg = self.load()
            records = run_sweep(cfg, self.out_path, registry=self.registry)
            self.runs += 1
            self.last_records = records
            return records

    def enable_watching(self, callback: Optional[Callable[[List[ResultRecord]], None]] = None) -> None:
        """
        Re-run the sweep whenever the config file changes.

        A failed re-run is logged and the previous CSV is left in place.

        Args:
            callback (callable, optional): Called with the records of each re-run
        """
        self.watcher = ConfigWatcher([self.config_path])

        def on_config_changed(path):
            logger.info("Config %s changed, re-running sweep", path)
            try:
                records = self.run()
            except (AirCompError, OSError) as e:
                logger.warning("Re-run after config change failed: %s", e)
                return
            if callback:
                callback(records)

        self.watcher.on_change(on_config_changed)
        self.watcher.start()

    def wait(self, timeout: Optional[float] = None) -> bool:
        """
        Block until stop() is called or the timeout expires.

        Returns:
            bool: True if the runner was stopped
        """
        return self._stopped.wait(timeout)

    def stop(self) -> None:
        """Stop watching and release wait()."""
        if self.watcher:
            self.watcher.stop()
            self.watcher = None
        self._stopped.set()

    def __enter__(self):
        """Enter context manager."""
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Exit context manager."""
        self.stop()
