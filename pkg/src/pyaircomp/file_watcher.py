"""
Config file watching for re-running sweeps.
"""
import logging
import os
from typing import Callable, Iterable, List

from watchdog.events import PatternMatchingEventHandler
from watchdog.observers import Observer

logger = logging.getLogger(__name__)


class ConfigWatcher:
    """
    Watches one or more config files and calls back when they change.

    The watchdog observer is scheduled on each file's directory with a
    pattern that matches only the file itself, so editors that replace the
    file on save are picked up as well.
    """

    def __init__(self, paths: Iterable[str]):
        """
        Initialize a new ConfigWatcher.

        Args:
            paths (list): Config files to watch

        Raises:
            ValueError: If paths is None or empty
        """
        if not paths:
            raise ValueError("paths must be a non-empty list of config files")

        self.paths = [os.path.abspath(p) for p in paths]
        self.observer = None
        self.callbacks = []

    @property
    def directories(self) -> List[str]:
        return sorted({os.path.dirname(p) for p in self.paths})

    @property
    def patterns(self) -> List[str]:
        return ["*" + os.path.basename(p) for p in self.paths]

    def on_change(self, callback: Callable[[str], None]) -> None:
        """
        Register a callback to be called when a watched file changes.

        Args:
            callback (callable): Called with the absolute path of the file
        """
        self.callbacks.append(callback)

    def _on_any_event(self, event):
        """
        Forward a watchdog event for a watched file to the callbacks.

        Args:
            event (watchdog.events.FileSystemEvent): The event to handle
        """
        if event.event_type not in ("modified", "created", "moved"):
            return
        path = os.path.abspath(getattr(event, "dest_path", "") or event.src_path)
        if path not in self.paths:
            return
        logger.debug("Config file changed: %s", path)
        for callback in self.callbacks:
            callback(path)

    def start(self) -> None:
        """Start watching the config files."""
        if self.observer:
            return

        self.observer = Observer()
        handler = PatternMatchingEventHandler(
            patterns=self.patterns,
            ignore_directories=True,
            case_sensitive=True,
        )
        handler.on_any_event = self._on_any_event
        for directory in self.directories:
            if os.path.isdir(directory):
                self.observer.schedule(handler, directory, recursive=False)
        self.observer.start()

    def stop(self) -> None:
        """Stop watching the config files."""
        if self.observer:
            self.observer.stop()
            self.observer.join()
            self.observer = None
