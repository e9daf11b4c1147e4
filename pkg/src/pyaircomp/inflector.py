"""
Name inflection for configuration values and method names.
"""
import re
from enum import Enum
from typing import Dict, Type, TypeVar, Union

from .errors import ConfigError

E = TypeVar("E", bound=Enum)


class Inflector:
    """
    Converts between the spellings users type and the canonical names.

    Every name is reduced to a snake_case key, so "ArithmeticMean",
    "arithmetic_mean" and "arithmetic-mean" all resolve to the same value.
    Custom inflections give the display form of keys that do not camelize
    cleanly, such as acronyms.
    """

    def __init__(self):
        """Initialize a new Inflector with empty custom inflections."""
        self.custom_inflections = {}

    def underscore(self, name: str) -> str:
        """
        Reduce a CamelCase, kebab-case or snake_case name to snake_case.

        Args:
            name (str): The name (e.g., "TBMA-robust")

        Returns:
            str: The snake_case key (e.g., "tbma_robust")
        """
        key = re.sub(r"[\s\-]+", "_", str(name).strip())
        key = re.sub(r"([A-Z]+)([A-Z][a-z])", r"\1_\2", key)
        key = re.sub(r"([a-z\d])([A-Z])", r"\1_\2", key)
        return key.lower()

    def camelize(self, name: str) -> str:
        """
        Convert a name to its display form.

        Args:
            name (str): Any spelling (e.g., "geometric_mean")

        Returns:
            str: The display name (e.g., "GeometricMean")
        """
        key = self.underscore(name)
        if key in self.custom_inflections:
            return self.custom_inflections[key]
        return ''.join(x.capitalize() or '_' for x in key.split('_'))

    def inflect(self, inflections: Dict[str, str]) -> None:
        """
        Add custom inflections to the inflector.

        Args:
            inflections (dict): A dictionary mapping from snake_case to display form
                               Example: {"tbma_robust": "TBMA-robust"}
        """
        self.custom_inflections.update({self.underscore(k): v for k, v in inflections.items()})

    def same(self, left: str, right: str) -> bool:
        """Return True if two spellings name the same thing."""
        return self.underscore(left) == self.underscore(right)

    def resolve(self, enum_cls: Type[E], name: Union[str, E]) -> E:
        """
        Resolve a spelling to a member of an enumeration.

        Args:
            enum_cls (type): Enumeration whose member values are canonical names
            name (str or enum.Enum): Spelling to resolve, or a member already

        Returns:
            enum.Enum: The matching member

        Raises:
            ConfigError: If no member matches
        """
        if isinstance(name, enum_cls):
            return name
        key = self.underscore(name)
        for member in enum_cls:
            if key in (self.underscore(member.value), member.name.lower()):
                return member
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"Unknown {enum_cls.__name__} '{name}'; expected one of: {choices}")


def default_inflector() -> Inflector:
    """Return an inflector that knows the acronyms used by PyAirComp."""
    inflector = Inflector()
    inflector.inflect({
        "da": "DA",
        "tbma_plain": "TBMA-plain",
        "tbma_median": "TBMA-median",
        "tbma_robust": "TBMA-robust",
        "fsk": "FSK",
        "ppm": "PPM",
    })
    return inflector

