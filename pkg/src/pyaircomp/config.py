"""
Experiment configuration: data laws, the sweep definition and YAML loading.

A config file is a flat YAML mapping of ExperimentConfig field names to
scalars or flow lists, for example::

    K: 1000
    L: 64
    methods: [DA, TBMA-median, TBMA-robust]
    fns: [arithmetic_mean, geometric_mean]
    snr_db_list: [30, 5]
    attacker_ratio_list: [0, 0.1, 0.2, 0.3, 0.4, 0.5]
    data_law: GaussianBins(32, 8)

Enumeration values accept any CamelCase, snake_case or kebab-case spelling.
"""
from __future__ import annotations

import dataclasses
import enum
import math
import re
from dataclasses import dataclass
from typing import Any, Optional, Tuple, Type, TypeVar, Union

import numpy as np
import yaml

from .aggregate import AggregationFn
from .attack import AttackStrategy
from .channel import ChannelModel
from .errors import ConfigError
from .inflector import default_inflector
from .model import MeasurementVector, Scheme, SystemConfig
from .robust import OutlierRule, RobustParams, Theta1Rule, default_theta1

_INFLECTOR = default_inflector()

DEFAULT_METHODS = ("DA", "TBMA-plain", "TBMA-median", "TBMA-robust")

# a config dataclass
C = TypeVar("C")


class Fidelity(enum.Enum):
    """Simulation depth of a TBMA trial."""

    SYMBOL = "symbol"
    WAVEFORM = "waveform"


@dataclass(frozen=True)
class GaussianBins:
    """Rounded normal data clipped to [1, L]."""

    mean: float
    std: float

    def __post_init__(self):
        if not self.std >= 0:
            raise ValueError(f"GaussianBins std must be >= 0, got {self.std}")

    def check(self, L: int) -> None:
        if not 1 <= self.mean <= L:
            raise ValueError(f"GaussianBins mean {self.mean} outside [1, {L}]")

    def sample(self, K: int, L: int, rng: np.random.Generator) -> MeasurementVector:
        values = np.rint(rng.normal(self.mean, self.std, K))
        return MeasurementVector(np.clip(values, 1, L).astype(np.int64), L)

    def __str__(self):
        return f"GaussianBins({self.mean:g}, {self.std:g})"


@dataclass(frozen=True)
class UniformBins:
    """Integers drawn uniformly from [a, b]."""

    a: int
    b: int

    def __post_init__(self):
        if not 1 <= self.a <= self.b:
            raise ValueError(f"UniformBins needs 1 <= a <= b, got ({self.a}, {self.b})")

    def check(self, L: int) -> None:
        if self.b > L:
            raise ValueError(f"UniformBins upper bound {self.b} exceeds L={L}")

    def sample(self, K: int, L: int, rng: np.random.Generator) -> MeasurementVector:
        self.check(L)
        return MeasurementVector(rng.integers(self.a, self.b + 1, size=K), L)

    def __str__(self):
        return f"UniformBins({self.a}, {self.b})"


@dataclass(frozen=True)
class Dirac:
    """Every device holds the same value c."""

    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"Dirac value must be >= 1, got {self.c}")

    def check(self, L: int) -> None:
        if self.c > L:
            raise ValueError(f"Dirac value {self.c} exceeds L={L}")

    def sample(self, K: int, L: int, rng: np.random.Generator) -> MeasurementVector:
        self.check(L)
        return MeasurementVector(np.full(K, self.c, dtype=np.int64), L)

    def __str__(self):
        return f"Dirac({self.c})"


DataLaw = Union[GaussianBins, UniformBins, Dirac]

_DATA_LAWS = {
    "gaussian_bins": (GaussianBins, (float, float)),
    "uniform_bins": (UniformBins, (int, int)),
    "dirac": (Dirac, (int,)),
}

_LAW_PATTERN = re.compile(r"^\s*([A-Za-z_\-]+)\s*\(([^()]*)\)\s*$")


def parse_data_law(text: str) -> DataLaw:
    """
    Parse a data law written as "GaussianBins(32, 8)", "UniformBins(1, 64)" or "Dirac(20)".

    Raises:
        ConfigError: If the text does not name a known law with valid arguments
    """
    if isinstance(text, (GaussianBins, UniformBins, Dirac)):
        return text
    match = _LAW_PATTERN.match(str(text))
    if not match:
        raise ConfigError(f"Cannot parse data law '{text}'")
    key = _INFLECTOR.underscore(match.group(1))
    if key not in _DATA_LAWS:
        raise ConfigError(f"Unknown data law '{match.group(1)}'; expected GaussianBins, UniformBins or Dirac")
    law_cls, kinds = _DATA_LAWS[key]
    args = [arg.strip() for arg in match.group(2).split(",") if arg.strip()]
    if len(args) != len(kinds):
        raise ConfigError(f"{law_cls.__name__} takes {len(kinds)} argument(s), got '{text}'")
    try:
        values = [kind(float(arg)) for kind, arg in zip(kinds, args)]
        return law_cls(*values)
    except ValueError as e:
        raise ConfigError(f"Invalid data law '{text}': {e}") from None


def _as_tuple(value):
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def _resolve(enum_cls, value):
    return _INFLECTOR.resolve(enum_cls, value)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Definition of an NMSE sweep.

    The sweep runs every method x fn x snr x ratio cell for `trials` trials.
    String values are resolved through the inflector, so the dataclass can be
    built straight from a YAML mapping.

    Attributes:
        K (int): Legitimate device count
        L (int): Number of resources
        N (int, optional): Samples per waveform; L when omitted
        scheme (Scheme): FSK or PPM
        fns (tuple): Aggregation functions
        methods (tuple): Method display names
        snr_db_list (tuple): SNR axis in dB
        attacker_ratio_list (tuple): Values of M/K
        trials (int): Trials per cell
        data_law (DataLaw, optional): Legitimate data law; GaussianBins(L/2, L/8) when omitted
        theta1 (float, optional): Fixed noise threshold; derived from the noise when omitted
        theta1_rule (Theta1Rule): Rule used when theta1 is omitted
        theta2 (float): Step 3 threshold in devices
        p_lo (float): Step 2 lower quantile
        p_hi (float): Step 2 upper quantile
        outlier_rule (OutlierRule): Step 3 outlier test
        attack_strategy (AttackStrategy): MaxDisplace or FixedResource
        attack_target (int, optional): Resource for FixedResource attacks
        fidelity (Fidelity): symbol or waveform level TBMA
        channel (ChannelModel): Identity or RayleighFlat
        master_seed (int): Root of every random stream
        workers (int): Worker threads for the sweep
    """

    K: int = 1000
    L: int = 64
    N: Optional[int] = None
    scheme: Scheme = Scheme.PPM
    fns: Tuple[AggregationFn, ...] = (AggregationFn.ARITHMETIC_MEAN,)
    methods: Tuple[str, ...] = DEFAULT_METHODS
    snr_db_list: Tuple[float, ...] = (30.0, 5.0)
    attacker_ratio_list: Tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    trials: int = 200
    data_law: Optional[DataLaw] = None
    theta1: Optional[float] = None
    theta1_rule: Theta1Rule = Theta1Rule.TYPE_STD
    theta2: float = 5.0
    p_lo: float = 0.01
    p_hi: float = 0.99
    outlier_rule: OutlierRule = OutlierRule.SPIKE
    attack_strategy: AttackStrategy = AttackStrategy.MAX_DISPLACE
    attack_target: Optional[int] = None
    fidelity: Fidelity = Fidelity.SYMBOL
    channel: ChannelModel = ChannelModel.IDENTITY
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        try:
            self._normalise()
            self._validate()
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None

    def _normalise(self):
        set_ = _setter(self)
        set_("K", int(self.K))
        set_("L", int(self.L))
        set_("N", None if self.N is None else int(self.N))
        set_("scheme", _resolve(Scheme, self.scheme))
        set_("fns", tuple(_resolve(AggregationFn, fn) for fn in _as_tuple(self.fns)))
        set_("methods", tuple(_INFLECTOR.camelize(m) for m in _as_tuple(self.methods)))
        set_("snr_db_list", tuple(float(x) for x in _as_tuple(self.snr_db_list)))
        set_("attacker_ratio_list", tuple(float(x) for x in _as_tuple(self.attacker_ratio_list)))
        set_("trials", int(self.trials))
        if self.data_law is not None:
            set_("data_law", parse_data_law(self.data_law))
        if self.theta1 is not None:
            set_("theta1", float(self.theta1))
        set_("theta1_rule", _resolve(Theta1Rule, self.theta1_rule))
        set_("theta2", float(self.theta2))
        set_("p_lo", float(self.p_lo))
        set_("p_hi", float(self.p_hi))
        set_("outlier_rule", _resolve(OutlierRule, self.outlier_rule))
        set_("attack_strategy", _resolve(AttackStrategy, self.attack_strategy))
        if self.attack_target is not None:
            set_("attack_target", int(self.attack_target))
        set_("fidelity", _resolve(Fidelity, self.fidelity))
        set_("channel", _resolve(ChannelModel, self.channel))
        set_("master_seed", int(self.master_seed))
        set_("workers", int(self.workers))

    def _validate(self):
        self.system()
        if not self.fns:
            raise ValueError("At least one aggregation function is required")
        if not self.methods:
            raise ValueError("At least one method is required")
        if not self.snr_db_list or not self.attacker_ratio_list:
            raise ValueError("The SNR and attacker-ratio axes must be non-empty")
        for snr in self.snr_db_list:
            if math.isnan(snr) or snr == -math.inf:
                raise ValueError(f"SNR values must be finite or +inf, got {snr}")
        for ratio in self.attacker_ratio_list:
            if not 0.0 <= ratio <= 1.0:
                raise ValueError(f"Attacker ratios must lie in [0, 1], got {ratio}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.master_seed < 0:
            raise ValueError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.attack_strategy is AttackStrategy.FIXED_RESOURCE:
            if self.attack_target is None or not 1 <= self.attack_target <= self.L:
                raise ValueError(f"FixedResource attacks need attack_target in [1, {self.L}]")
        self.law.check(self.L)
        RobustParams(
            theta1=self.theta1 or 0.0, theta2=self.theta2, p_lo=self.p_lo, p_hi=self.p_hi,
            outlier_rule=self.outlier_rule,
        )

    @property
    def samples(self) -> int:
        """Samples per waveform, L when N is not set."""
        return self.L if self.N is None else self.N

    @property
    def law(self) -> DataLaw:
        """The data law, defaulting to GaussianBins(L/2, L/8)."""
        if self.data_law is None:
            return GaussianBins(self.L / 2, self.L / 8)
        return self.data_law

    def system(self, snr_db: float = 30.0) -> SystemConfig:
        """Physical-layer parameters at one SNR."""
        return SystemConfig(self.K, self.L, snr_db=snr_db, scheme=self.scheme, N=self.samples)

    def robust_params(self, sigma2: float) -> RobustParams:
        """Robust correction parameters at a noise power."""
        theta1 = self.theta1 if self.theta1 is not None else default_theta1(sigma2, self.K, self.theta1_rule)
        return RobustParams(
            theta1=theta1, theta2=self.theta2, p_lo=self.p_lo, p_hi=self.p_hi,
            outlier_rule=self.outlier_rule,
        )

    def metadata(self) -> dict:
        """Key/value pairs written at the top of result files."""
        return {
            "K": self.K,
            "L": self.L,
            "N": self.samples,
            "scheme": self.scheme.value,
            "fns": ",".join(fn.value for fn in self.fns),
            "methods": ",".join(self.methods),
            "snr_db_list": ",".join(repr(x) for x in self.snr_db_list),
            "attacker_ratio_list": ",".join(repr(x) for x in self.attacker_ratio_list),
            "trials": self.trials,
            "data_law": str(self.law),
            "theta1": "auto" if self.theta1 is None else repr(self.theta1),
            "theta1_rule": self.theta1_rule.value,
            "theta2": repr(self.theta2),
            "p_lo": repr(self.p_lo),
            "p_hi": repr(self.p_hi),
            "outlier_rule": self.outlier_rule.value,
            "attack_strategy": self.attack_strategy.value,
            "attack_target": "auto" if self.attack_target is None else self.attack_target,
            "fidelity": self.fidelity.value,
            "channel": self.channel.value,
            "master_seed": self.master_seed,
            "snr_convention": "per-link unit amplitude, sigma2=10^(-snr_db/10)",
            "attacker_ratio": "M/K with attackers in addition to the K devices, M=floor(ratio*K+0.5)",
            "normalisation": "K",
        }


def _setter(instance):
    """Return a setter for fields of a frozen dataclass during __post_init__."""
    def set_(name, value):
        object.__setattr__(instance, name, value)
    return set_


def load_config(path: str, cls: Type[C] = ExperimentConfig) -> C:
    """
    Load a dataclass config from a flat YAML mapping.

    Args:
        path (str): Path to the YAML file
        cls (type): Config dataclass to build

    Returns:
        The config instance

    Raises:
        ConfigError: If the file cannot be read or parsed, holds unknown keys,
            or holds invalid values
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse config file {path}: {e}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a mapping, got {type(data).__name__}")
    _check_keys(cls, data)
    return _build(cls, data)


def apply_overrides(cfg: C, **overrides: Any) -> C:
    """
    Return a copy of cfg with the non-None overrides applied.

    Raises:
        ConfigError: If an override names an unknown field or has an invalid value
    """
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return cfg
    _check_keys(type(cfg), overrides)
    try:
        return dataclasses.replace(cfg, **overrides)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def _check_keys(cls, data):
    known = {field.name for field in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"Unknown config key(s) for {cls.__name__}: {', '.join(map(str, unknown))}")


def _build(cls, data):
    try:
        return cls(**data)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None
