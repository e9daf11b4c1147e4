"""
Tests for federated learning over TBMA.
"""
import math
import os

import numpy as np
import pytest
import pyaircomp.fl as fl
from pyaircomp.errors import ConfigError, EstimationError, TrainingError
from pyaircomp.fl import (
    FL_CSV_HEADER,
    FlConfig,
    FlMethod,
    ToyModel,
    aggregate_parameters,
    evaluate,
    federated_average,
    fl_round,
    local_train,
    make_blobs,
    prepare_data,
    run_fl,
    shard,
    write_fl_csv,
)
from pyaircomp.model import bin_to_value


def _small_config(**overrides):
    values = dict(K=20, attackers=2, rounds=3, n_train=800, n_test=400)
    values.update(overrides)
    return FlConfig(**values)


class TestFlConfig:
    """Test suite for FlConfig."""

    def test_defaults(self):
        """Test the default experiment."""
        cfg = FlConfig()

        assert cfg.D == 36
        assert cfg.method is FlMethod.TBMA_ROBUST
        assert cfg.sigma2 == pytest.approx(1e-3)
        assert cfg.metadata()["resources_per_round"] == 36 * 2048

    def test_method_spelling(self):
        """Test that methods resolve from any spelling."""
        assert FlConfig(method="tbma_plain").method is FlMethod.TBMA_PLAIN
        assert FlConfig(method="Baseline").method is FlMethod.BASELINE
        assert not FlMethod.BASELINE.attacked and FlMethod.DA.attacked

    def test_validation(self):
        """Test that invalid experiments raise ConfigError."""
        for kwargs in ({"K": 0}, {"attackers": 50}, {"rounds": 0}, {"clip": 0.0}, {"L": 1},
                       {"n_classes": 9}, {"n_train": 10}, {"snr_db": float("nan")}, {"theta2": -1.0},
                       {"method": "fedprox"}):
            with pytest.raises(ConfigError):
                FlConfig(**kwargs)


class TestToyModel:
    """Test suite for ToyModel."""

    def test_shapes(self):
        """Test the flat-to-matrix layout with the bias row last."""
        model = ToyModel(np.arange(6.0), 2, 2)

        np.testing.assert_array_equal(model.matrix(), [[0, 1], [2, 3], [4, 5]])
        np.testing.assert_array_equal(model.logits(np.array([[1.0, 0.0]])), [[4.0, 6.0]])

    def test_validation(self):
        """Test that wrong sizes and non-finite weights are rejected."""
        with pytest.raises(ValueError):
            ToyModel(np.zeros(5), 2, 2)
        with pytest.raises(ValueError):
            ToyModel([0, 0, 0, 0, 0, math.nan], 2, 2)

    def test_zero_model_loss(self):
        """Test that the zero model has loss log C."""
        X = np.random.default_rng(0).standard_normal((10, 3))
        assert ToyModel.zeros(3, 4).loss(X, np.arange(10) % 4) == pytest.approx(math.log(4))


class TestLocalTrain:
    """Test suite for local_train."""

    def test_zero_learning_rate(self, rng):
        """Test that lr = 0 leaves the weights unchanged."""
        model = ToyModel(rng.standard_normal(6), 2, 2)
        data = (rng.standard_normal((20, 2)), rng.integers(0, 2, 20))
        np.testing.assert_array_equal(local_train(model, data, 5, 0.0), model.weights)

    def test_loss_decreases(self):
        """Test that training lowers the loss on a separable shard."""
        X = np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0], [0.1, 0.9]])
        y = np.array([0, 0, 1, 1])
        model = ToyModel.zeros(2, 2)
        trained = model.with_weights(local_train(model, (X, y), 20, 0.1))

        assert trained.loss(X, y) < model.loss(X, y)
        assert evaluate(trained, (X, y)) == 1.0

    def test_identical_shards(self, rng):
        """Test that equal shards give equal weights."""
        data = (rng.standard_normal((30, 3)), rng.integers(0, 3, 30))
        model = ToyModel.zeros(3, 3)
        np.testing.assert_array_equal(local_train(model, data, 3, 0.05), local_train(model, data, 3, 0.05))

    def test_divergence(self):
        """Test that a non-finite loss raises TrainingError."""
        X = np.array([[1e308, 1e308]])
        model = ToyModel(np.ones(6), 2, 2)
        with pytest.raises(TrainingError):
            local_train(model, (X, np.array([0])), 2, 1.0)

    def test_empty_shard(self):
        """Test that an empty shard is rejected."""
        with pytest.raises(ValueError):
            local_train(ToyModel.zeros(2, 2), (np.zeros((0, 2)), np.zeros(0, dtype=int)), 1, 0.1)


class TestEvaluate:
    """Test suite for evaluate."""

    def test_constant_prediction(self):
        """Test that always predicting class 0 scores 1/C on balanced data."""
        cfg = FlConfig()
        X, y = make_blobs(400, cfg, np.random.default_rng(1))
        weights = np.zeros(cfg.D)
        weights[-cfg.n_classes] = 1.0
        assert evaluate(ToyModel(weights, cfg.n_features, cfg.n_classes), (X, y)) == pytest.approx(0.25)

    def test_perfect(self):
        """Test an exact classifier."""
        X = np.eye(3)
        weights = np.vstack([np.eye(3), np.zeros((1, 3))]).reshape(-1)
        assert evaluate(ToyModel(weights, 3, 3), (X, np.arange(3))) == 1.0

    def test_random_labels(self):
        """Test that random weights on random labels score about 1/C."""
        scores = []
        for seed in range(10):
            rng = np.random.default_rng(seed)
            X = rng.standard_normal((4000, 8))
            y = rng.integers(0, 4, 4000)
            scores.append(evaluate(ToyModel(rng.standard_normal(36), 8, 4), (X, y)))
        assert np.mean(scores) == pytest.approx(0.25, abs=0.02)

    def test_empty(self):
        """Test that an empty test set is rejected."""
        with pytest.raises(ValueError):
            evaluate(ToyModel.zeros(2, 2), (np.zeros((0, 2)), np.zeros(0, dtype=int)))


class TestData:
    """Test suite for the synthetic task."""

    def test_blobs_balanced(self, rng):
        """Test that every class appears equally often."""
        X, y = make_blobs(400, FlConfig(), rng)

        assert X.shape == (400, 8)
        np.testing.assert_array_equal(np.bincount(y), [100] * 4)

    def test_shards(self, rng):
        """Test that shards partition the data."""
        X = np.arange(10.0).reshape(10, 1)
        shards = shard(X, np.arange(10), 3, rng)

        assert [len(s[1]) for s in shards] == [4, 3, 3]
        assert sorted(np.concatenate([s[1] for s in shards])) == list(range(10))

    def test_prepare_data_is_seeded(self):
        """Test that the data depend only on the master seed."""
        cfg = _small_config()
        a, test_a = prepare_data(cfg)
        b, test_b = prepare_data(cfg)

        assert len(a) == cfg.K
        np.testing.assert_array_equal(test_a[0], test_b[0])
        np.testing.assert_array_equal(a[3][1], b[3][1])


class TestAggregation:
    """Test suite for over-the-air parameter aggregation."""

    def test_noiseless_plain_equals_federated_average(self, rng):
        """Test that TBMA without noise or attackers averages the dequantized weights."""
        cfg = _small_config(attackers=0, snr_db=math.inf, method="TBMA-plain")
        shards, _ = prepare_data(cfg)
        start = np.zeros(cfg.D)

        result = fl_round(start, shards, cfg, rng)
        np.testing.assert_allclose(result, federated_average(start, shards, cfg), atol=1e-12)

    def test_quantization_bound(self, rng):
        """Test that fine quantization stays within half a bin of the true mean."""
        cfg = _small_config(attackers=0, snr_db=math.inf, L=4096)
        local = rng.uniform(-0.9, 0.9, size=(cfg.K, cfg.D))
        result = aggregate_parameters(local, cfg, FlMethod.BASELINE, rng)
        assert np.max(np.abs(result - local.mean(axis=0))) <= cfg.clip / cfg.L + 1e-12

    def test_robust_beats_plain(self):
        """Test that the robust correction tracks the clean average under attack."""
        cfg = FlConfig(K=50, attackers=3, snr_db=math.inf)
        shards, _ = prepare_data(cfg)
        start = np.zeros(cfg.D)
        reference = federated_average(start, shards, cfg)

        plain = fl_round(start, shards, cfg, np.random.default_rng(0), FlMethod.TBMA_PLAIN)
        robust = fl_round(start, shards, cfg, np.random.default_rng(0), FlMethod.TBMA_ROBUST)
        closer = np.abs(robust - reference) < np.abs(plain - reference)
        assert np.mean(closer) >= 0.95

    def test_da_attack_shifts_toward_top_bin(self):
        """Test that DA attackers add M L / K bins and the estimate is clamped to the last bin."""
        cfg = _small_config(K=20, attackers=2, snr_db=math.inf, L=64)
        rng = np.random.default_rng(0)

        centre = aggregate_parameters(np.zeros((cfg.K, cfg.D)), cfg, FlMethod.DA, rng)
        np.testing.assert_allclose(centre, bin_to_value(33 + 2 * 64 / 20, -1.0, 1.0, 64))

        top = aggregate_parameters(np.full((cfg.K, cfg.D), 0.99), cfg, FlMethod.DA, rng)
        np.testing.assert_allclose(top, 1.0 - 1.0 / 64)

    def test_no_mass_keeps_previous_weights(self, rng, monkeypatch):
        """Test that a parameter without retained mass keeps the fallback weight."""
        cfg = _small_config(attackers=0, snr_db=math.inf, L=64)
        local = rng.uniform(-0.5, 0.5, size=(cfg.K, cfg.D))
        previous = rng.uniform(-0.5, 0.5, size=cfg.D)

        def no_mass(r, fn, noise_floor=0.0):
            raise EstimationError("no mass")

        monkeypatch.setattr(fl, "psi", no_mass)
        np.testing.assert_array_equal(
            aggregate_parameters(local, cfg, FlMethod.TBMA_PLAIN, rng, fallback=previous), previous
        )
        with pytest.raises(EstimationError):
            aggregate_parameters(local, cfg, FlMethod.TBMA_PLAIN, rng)

    def test_wrong_shard_count(self, rng):
        """Test that the shard count must equal K."""
        cfg = _small_config()
        shards, _ = prepare_data(cfg)
        with pytest.raises(ValueError):
            fl_round(np.zeros(cfg.D), shards[:-1], cfg, rng)


class TestRunFl:
    """Test suite for run_fl."""

    def test_records(self):
        """Test one record per round with D x L resources each."""
        cfg = _small_config(L=256)
        records = run_fl(cfg, FlMethod.BASELINE)

        assert [r.round for r in records] == [1, 2, 3]
        assert all(r.resources == cfg.D * 256 for r in records)
        assert all(0.0 <= r.accuracy <= 1.0 for r in records)
        assert records[0].method == "baseline"

    def test_deterministic(self):
        """Test that reruns give the same accuracies."""
        cfg = _small_config(rounds=2)
        assert run_fl(cfg) == run_fl(cfg)

    def test_robust_close_to_baseline(self):
        """Test that robust TBMA under attack stays within 5 points of the clean baseline."""
        cfg = FlConfig(rounds=10)
        baseline = run_fl(cfg, FlMethod.BASELINE)[-1].accuracy
        robust = run_fl(cfg, FlMethod.TBMA_ROBUST)[-1].accuracy

        assert baseline > 0.5
        assert robust >= baseline - 0.05

    def test_da_under_attack_near_chance(self):
        """Test that DA with 3 attackers among 50 devices ends within 10 points of chance."""
        cfg = FlConfig()
        baseline = run_fl(cfg, FlMethod.BASELINE)[-1].accuracy
        da = run_fl(cfg, FlMethod.DA)[-1].accuracy

        assert abs(da - 1.0 / cfg.n_classes) <= 0.10
        assert da < baseline - 0.3

    def test_csv(self, temp_dir):
        """Test the round file."""
        cfg = _small_config(rounds=2, L=256)
        path = os.path.join(temp_dir, "fl.csv")
        write_fl_csv(run_fl(cfg, "baseline"), cfg, path)

        with open(path) as f:
            lines = [line.strip() for line in f if not line.startswith("#")]
        assert lines[0] == ",".join(FL_CSV_HEADER)
        assert lines[1].startswith("1,baseline,")
        assert len(lines) == 3
