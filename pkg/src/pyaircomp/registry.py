"""
Estimator registry for PyAirComp.

The registry maps method names to the callables that turn one trial's
inputs into an estimate, along with the functions each method supports.
"""
import threading
from dataclasses import dataclass
from typing import Callable, FrozenSet, Iterable, List, Optional

from .aggregate import AggregationFn
from .errors import ConfigError
from .inflector import Inflector, default_inflector


@dataclass(frozen=True)
class EstimatorEntry:
    """
    A registered estimation method.

    Attributes:
        name (str): Display name, e.g. "TBMA-robust"
        estimate (Callable): Maps a trial context to an estimate
        energy (Callable): Maps a trial context to the transmit energy
        fns (frozenset): Aggregation functions the method supports
    """

    name: str
    estimate: Callable
    energy: Callable
    fns: FrozenSet[AggregationFn]


class EstimatorRegistry:
    """
    Thread-safe registry of estimation methods.

    Names are matched through an inflector, so "tbma_robust", "TBMA-robust"
    and "tbma-robust" refer to the same method.
    """

    def __init__(self, inflector: Optional[Inflector] = None):
        """
        Initialize an empty registry.

        Args:
            inflector (Inflector, optional): Name resolver; defaults to one
                that knows the built-in acronyms
        """
        self.inflector = inflector or default_inflector()
        self._entries = {}
        self._lock = threading.RLock()

    def register(self, name: str, estimate: Callable, energy: Callable,
                 fns: Iterable[AggregationFn]) -> EstimatorEntry:
        """
        Register an estimation method, replacing any method of the same name.

        Args:
            name (str): Method name in any spelling
            estimate (callable): Trial context -> estimate
            energy (callable): Trial context -> transmit energy
            fns (iterable): Supported AggregationFn members

        Returns:
            EstimatorEntry: The stored entry
        """
        fns = frozenset(fns)
        if not fns:
            raise ValueError(f"Method '{name}' must support at least one function")
        entry = EstimatorEntry(self.inflector.camelize(name), estimate, energy, fns)
        with self._lock:
            self._entries[self.inflector.underscore(name)] = entry
        return entry

    def contains(self, name: str) -> bool:
        """
        Check if a method is registered.

        Args:
            name (str): Method name in any spelling

        Returns:
            bool: True if the method is registered, False otherwise
        """
        with self._lock:
            return self.inflector.underscore(name) in self._entries

    def get(self, name: str) -> EstimatorEntry:
        """
        Get a registered method.

        Args:
            name (str): Method name in any spelling

        Returns:
            EstimatorEntry: The registered entry

        Raises:
            ConfigError: If the method is not registered
        """
        with self._lock:
            try:
                return self._entries[self.inflector.underscore(name)]
            except KeyError:
                known = ", ".join(self.get_all_methods())
                raise ConfigError(f"Unknown method '{name}'; registered methods: {known}") from None

    def canonical(self, name: str) -> str:
        """Return the display name of a registered method."""
        return self.get(name).name

    def supports(self, name: str, fn: AggregationFn) -> bool:
        """
        Check if a method can estimate a function.

        Raises:
            ConfigError: If the method is not registered
        """
        return fn in self.get(name).fns

    def get_all_methods(self) -> List[str]:
        """
        Get all registered method names.

        Returns:
            list: Display names in registration order
        """
        with self._lock:
            return [entry.name for entry in self._entries.values()]
