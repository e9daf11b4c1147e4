"""
Federated learning over TBMA with Byzantine devices.

K honest devices train a multinomial logistic regression on IID shards of a
synthetic Gaussian-blob task. Every round each device quantizes its D
parameters onto L bins; each parameter gets its own type, so one round
occupies D x L resources. M attackers add their mass on the MaxDisplace bin
of every parameter's type. The server estimates the mean bin of each
parameter and maps it back to the weight axis.

Methods:

* ``baseline``: TBMA without attackers or noise;
* ``TBMA-plain``: TBMA under attack, no correction;
* ``TBMA-robust``: TBMA under attack with the robust correction;
* ``DA``: direct aggregation of the bin indices under attack.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.special import log_softmax, softmax

from .aggregate import AggregationFn, psi
from .attack import AttackSpec, AttackStrategy, max_displace_targets
from .channel import snr_to_sigma2
from .da import da_aggregate, da_attack_target
from .errors import ConfigError, EstimationError, TrainingError
from .inflector import default_inflector
from .model import MeasurementVector, bin_to_value, quantize_array
from .robust import CorrectedType, OutlierRule, RobustParams, Theta1Rule, default_theta1, robust_correct
from .seeding import derive_rng
from .tbma import corrupt_type, form_type_symbol

logger = logging.getLogger(__name__)

_INFLECTOR = default_inflector()

FL_CSV_HEADER = ("round", "method", "accuracy")


class FlMethod(enum.Enum):
    """Aggregation used by the server."""

    BASELINE = "baseline"
    TBMA_PLAIN = "TBMA-plain"
    TBMA_ROBUST = "TBMA-robust"
    DA = "DA"

    @property
    def attacked(self) -> bool:
        return self is not FlMethod.BASELINE


@dataclass(frozen=True)
class FlConfig:
    """
    Federated-learning experiment definition.

    Attributes:
        K (int): Honest devices
        attackers (int): Byzantine devices M, in addition to K
        rounds (int): Communication rounds
        local_epochs (int): Full-batch gradient steps per round
        learning_rate (float): Local step size
        clip (float): Quantization range [-clip, clip]
        L (int): Bins per parameter
        snr_db (float): Per-link SNR; +inf for a noiseless link
        method (FlMethod): Server aggregation
        n_classes (int): Classes C of the blob task
        n_features (int): Feature dimension F, >= C
        n_train (int): Training samples shared among the devices
        n_test (int): Test samples
        center_distance (float): Distance of each class centre from the origin
        noise_std (float): Per-feature standard deviation around the centres
        theta1 (float, optional): Noise threshold; 3 x type-noise std when omitted
        theta2 (float): Outlier threshold in devices
        p_lo (float): Lower truncation quantile
        p_hi (float): Upper truncation quantile
        outlier_rule (OutlierRule): Step 3 outlier test
        master_seed (int): Root of every random stream
    """

    K: int = 50
    attackers: int = 3
    rounds: int = 30
    local_epochs: int = 2
    learning_rate: float = 0.02
    clip: float = 1.0
    L: int = 2048
    snr_db: float = 30.0
    method: FlMethod = FlMethod.TBMA_ROBUST
    n_classes: int = 4
    n_features: int = 8
    n_train: int = 4000
    n_test: int = 2000
    center_distance: float = 12.0
    noise_std: float = 6.0
    theta1: Optional[float] = None
    theta2: float = 2.0
    p_lo: float = 0.0
    p_hi: float = 1.0
    outlier_rule: OutlierRule = OutlierRule.SPIKE
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "method", _INFLECTOR.resolve(FlMethod, self.method))
        object.__setattr__(self, "outlier_rule", _INFLECTOR.resolve(OutlierRule, self.outlier_rule))
        object.__setattr__(self, "snr_db", float(self.snr_db))
        try:
            self._validate()
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def _validate(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not 0 <= self.attackers < self.K:
            raise ValueError(f"Need 0 <= attackers < K, got {self.attackers}")
        if self.rounds < 1 or self.local_epochs < 0:
            raise ValueError("rounds must be >= 1 and local_epochs >= 0")
        if not self.clip > 0:
            raise ValueError(f"clip must be > 0, got {self.clip}")
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if not 2 <= self.n_classes <= self.n_features:
            raise ValueError(f"Need 2 <= n_classes <= n_features, got {self.n_classes}, {self.n_features}")
        if self.n_train < self.K or self.n_test < 1:
            raise ValueError("Every device needs at least one training sample and the test set must be non-empty")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError(f"SNR must be finite or +inf, got {self.snr_db}")
        self.robust_params(0.0)

    @property
    def D(self) -> int:
        """Number of model parameters, (F + 1) x C."""
        return (self.n_features + 1) * self.n_classes

    @property
    def sigma2(self) -> float:
        return snr_to_sigma2(self.snr_db)

    def robust_params(self, sigma2: float) -> RobustParams:
        theta1 = self.theta1 if self.theta1 is not None else default_theta1(sigma2, self.K, Theta1Rule.TYPE_STD)
        return RobustParams(theta1=theta1, theta2=self.theta2, p_lo=self.p_lo, p_hi=self.p_hi,
                            outlier_rule=self.outlier_rule)

    def metadata(self) -> dict:
        data = {field.name: getattr(self, field.name) for field in dataclasses.fields(self)}
        data["method"] = self.method.value
        data["outlier_rule"] = self.outlier_rule.value
        data["theta1"] = "auto" if self.theta1 is None else self.theta1
        data["D"] = self.D
        data["resources_per_round"] = self.D * self.L
        return data


@dataclass(frozen=True)
class FlRoundRecord:
    """Accounting of one round: test accuracy and resources used (D x L)."""

    round: int
    method: str
    accuracy: float
    resources: int


@dataclass(frozen=True, eq=False)
class ToyModel:
    """
    Multinomial logistic regression with flat weights.

    The flat vector reshapes to an (F + 1) x C matrix whose last row holds
    the class biases.
    """

    weights: np.ndarray
    n_features: int
    n_classes: int

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.size != (self.n_features + 1) * self.n_classes:
            raise ValueError(
                f"Expected {(self.n_features + 1) * self.n_classes} weights, got {weights.size}"
            )
        if not np.all(np.isfinite(weights)):
            raise ValueError("Model weights must be finite")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zeros(cls, n_features: int, n_classes: int) -> "ToyModel":
        return cls(np.zeros((n_features + 1) * n_classes), n_features, n_classes)

    def with_weights(self, weights: npt.ArrayLike) -> "ToyModel":
        return ToyModel(weights, self.n_features, self.n_classes)

    def matrix(self) -> np.ndarray:
        return self.weights.reshape(self.n_features + 1, self.n_classes)

    def logits(self, X: npt.ArrayLike) -> np.ndarray:
        return _augment(X) @ self.matrix()

    def predict(self, X: npt.ArrayLike) -> np.ndarray:
        return np.argmax(self.logits(X), axis=1)

    def loss(self, X: npt.ArrayLike, y: npt.ArrayLike) -> float:
        """Mean cross-entropy over (X, y)."""
        log_p = log_softmax(self.logits(X), axis=1)
        return float(-np.mean(log_p[np.arange(len(y)), y]))


# (features, labels)
Dataset = Tuple[np.ndarray, np.ndarray]

def _augment(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def make_blobs(n: int, cfg: FlConfig, rng: np.random.Generator) -> Dataset:
    """
    Draw a balanced C-class Gaussian-blob dataset.

    Class c is centred at center_distance * e_c with isotropic noise.

    Returns:
        tuple: Features (n x F) and integer labels (n,)
    """
    y = np.arange(n) % cfg.n_classes
    rng.shuffle(y)
    centres = cfg.center_distance * np.eye(cfg.n_classes, cfg.n_features)
    X = centres[y] + cfg.noise_std * rng.standard_normal((n, cfg.n_features))
    return X, y


def shard(X: np.ndarray, y: np.ndarray, K: int, rng: np.random.Generator) -> List[Dataset]:
    """Split a dataset IID into K shards of near-equal size."""
    order = rng.permutation(len(y))
    return [(X[idx], y[idx]) for idx in np.array_split(order, K)]


def local_train(model: ToyModel, data: Dataset, epochs: int, lr: float) -> np.ndarray:
    """
    Run full-batch gradient descent on the cross-entropy of one shard.

    Args:
        model (ToyModel): Starting model
        data (tuple): Features and labels of the shard
        epochs (int): Gradient steps
        lr (float): Step size

    Returns:
        np.ndarray: The trained flat weights

    Raises:
        ValueError: If the shard is empty
        TrainingError: If the loss stops being finite
    """
    X, y = data
    if len(y) == 0:
        raise ValueError("Cannot train on an empty shard")
    A = _augment(X)
    onehot = np.eye(model.n_classes)[y]
    W = model.matrix().copy()
    for _ in range(epochs):
        logits = A @ W
        log_p = log_softmax(logits, axis=1)
        loss = -np.mean(np.sum(onehot * log_p, axis=1))
        if not math.isfinite(loss):
            raise TrainingError(f"Local loss became {loss}")
        W -= lr * A.T @ (softmax(logits, axis=1) - onehot) / len(y)
    if not np.all(np.isfinite(W)):
        raise TrainingError("Local weights became non-finite")
    return W.reshape(-1)


def evaluate(model: ToyModel, test_set: Dataset) -> float:
    """
    Fraction of correctly classified test samples.

    Raises:
        ValueError: If the test set is empty
    """
    X, y = test_set
    if len(y) == 0:
        raise ValueError("Cannot evaluate on an empty test set")
    return float(np.mean(model.predict(X) == np.asarray(y)))


def aggregate_parameters(local_weights: np.ndarray, cfg: FlConfig, method: FlMethod, rng: np.random.Generator,
                         fallback: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Aggregate the devices' weights parameter by parameter over the air.

    TBMA attackers put their mass on the MaxDisplace bin of every parameter's
    type. DA attackers send the value that moves the K-normalised sum the
    most (see ``da_attack_target``). Bin estimates are clamped to [1, L]
    before they are mapped back to the weight axis.

    Args:
        local_weights (array_like): K x D weights of the honest devices
        cfg (FlConfig): Quantizer, attack and robust settings
        method (FlMethod): Server aggregation
        rng (np.random.Generator): Noise stream of the round
        fallback (array_like, optional): D weights kept for a parameter whose
            type has no retained mass, usually the previous global weights

    Returns:
        np.ndarray: The D new global weights

    Raises:
        EstimationError: If a type has no retained mass and no fallback is given
    """
    local_weights = np.asarray(local_weights, dtype=float)
    lo, hi, L = -cfg.clip, cfg.clip, cfg.L
    bins = quantize_array(local_weights, lo, hi, L)
    sigma2 = 0.0 if method is FlMethod.BASELINE else cfg.sigma2
    M = cfg.attackers if method.attacked else 0
    attack = AttackSpec(M, AttackStrategy.MAX_DISPLACE)
    params = cfg.robust_params(sigma2)
    if method is FlMethod.DA:
        targets = np.full(bins.shape[1], da_attack_target(AggregationFn.ARITHMETIC_MEAN, L))
    else:
        targets = max_displace_targets(bins.mean(axis=0), L)

    positions = np.empty(bins.shape[1])
    for d in range(bins.shape[1]):
        s = MeasurementVector(bins[:, d], L)
        target = int(targets[d]) if M > 0 else None
        if method is FlMethod.DA:
            positions[d] = da_aggregate(s, AggregationFn.ARITHMETIC_MEAN, attack, sigma2, rng, target)
            continue
        r = corrupt_type(form_type_symbol(s, L, sigma2, rng), attack, target)
        if method is FlMethod.TBMA_ROBUST:
            corrected = robust_correct(r, params)
            if not corrected.retained_mass > 0:
                logger.warning("Robust correction removed all mass of parameter %d; using the raw type", d)
                corrected = CorrectedType(r.r, r.K)
            r = corrected
        try:
            positions[d] = psi(r, AggregationFn.ARITHMETIC_MEAN)
        except EstimationError:
            if fallback is None:
                raise
            logger.warning("Parameter %d has no retained mass; keeping the previous global weight", d)
            positions[d] = np.nan
    weights = bin_to_value(np.clip(positions, 1, L), lo, hi, L)
    if fallback is not None:
        missing = np.isnan(weights)
        weights[missing] = np.asarray(fallback, dtype=float)[missing]
    return weights


def fl_round(global_weights: np.ndarray, device_shards: Sequence, cfg: FlConfig, rng: np.random.Generator,
             method: Optional[FlMethod] = None) -> np.ndarray:
    """
    Run one federated round.

    Every honest device trains from the global weights on its shard, then
    the server aggregates the quantized parameters with the chosen method.

    Args:
        global_weights (array_like): Flat weights at the start of the round
        device_shards (sequence): K (features, labels) shards
        cfg (FlConfig): Experiment definition
        rng (np.random.Generator): Noise stream of the round
        method (FlMethod, optional): Overrides cfg.method

    Returns:
        np.ndarray: The new global weights
    """
    method = cfg.method if method is None else _INFLECTOR.resolve(FlMethod, method)
    if len(device_shards) != cfg.K:
        raise ValueError(f"Expected {cfg.K} device shards, got {len(device_shards)}")
    model = ToyModel(global_weights, cfg.n_features, cfg.n_classes)
    local = np.stack([
        local_train(model, data, cfg.local_epochs, cfg.learning_rate) for data in device_shards
    ])
    return aggregate_parameters(local, cfg, method, rng, fallback=model.weights)


def federated_average(global_weights: np.ndarray, device_shards: Sequence, cfg: FlConfig) -> np.ndarray:
    """In-memory reference: plain mean of the dequantized local weights."""
    model = ToyModel(global_weights, cfg.n_features, cfg.n_classes)
    local = np.stack([
        local_train(model, data, cfg.local_epochs, cfg.learning_rate) for data in device_shards
    ])
    bins = quantize_array(local, -cfg.clip, cfg.clip, cfg.L)
    return np.mean(bin_to_value(bins, -cfg.clip, cfg.clip, cfg.L), axis=0)


def prepare_data(cfg: FlConfig) -> Tuple[List[Dataset], Dataset]:
    """
    Draw the training shards and the test set of an experiment.

    The data depend only on the master seed, so every method trains on the
    same devices.

    Returns:
        tuple: (list of K shards, test set)
    """
    rng = derive_rng(cfg.master_seed, "fl-data")
    X, y = make_blobs(cfg.n_train, cfg, rng)
    test_set = make_blobs(cfg.n_test, cfg, rng)
    return shard(X, y, cfg.K, rng), test_set


def run_fl(cfg: FlConfig, method: Optional[FlMethod] = None) -> List[FlRoundRecord]:
    """
    Train for cfg.rounds rounds and record the test accuracy after each.

    Returns:
        list: One FlRoundRecord per round
    """
    method = cfg.method if method is None else _INFLECTOR.resolve(FlMethod, method)
    shards, test_set = prepare_data(cfg)
    model = ToyModel.zeros(cfg.n_features, cfg.n_classes)
    records = []
    for rnd in range(1, cfg.rounds + 1):
        rng = derive_rng(cfg.master_seed, "fl", method.value, rnd)
        model = model.with_weights(fl_round(model.weights, shards, cfg, rng, method))
        accuracy = evaluate(model, test_set)
        records.append(FlRoundRecord(rnd, method.value, accuracy, cfg.D * cfg.L))
        logger.info("%s round %d: accuracy %.3f", method.value, rnd, accuracy)
    return records


def write_fl_csv(records: List[FlRoundRecord], cfg: FlConfig, path: str) -> None:
    """
    Write round records with "# key=value" metadata lines before the header.

    Raises:
        OSError: If the file cannot be written
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        for key, value in cfg.metadata().items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f)
        writer.writerow(FL_CSV_HEADER)
        for record in records:
            writer.writerow((record.round, record.method, repr(record.accuracy)))
    logger.info("Wrote %d rounds to %s", len(records), path)
