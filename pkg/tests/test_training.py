import numpy as np
import pytest

from helpers import overfit_corpus
from topicsum.errors import CheckpointError, ConfigError, TrainingError
from topicsum.model import ModelConfig, forward_loss, init_params
from topicsum.neuro import Tensor
from topicsum.pipeline import (
    AdamState,
    TrainConfig,
    adam_step,
    clip_by_global_norm,
    load_checkpoint,
    save_checkpoint,
    train,
    write_loss_log,
)
from topicsum.pipeline import training as training_module


def toy_setup(n=6, epochs=3, **train_overrides):
    code_vocab, sum_vocab, instances = overfit_corpus(n=n, seed=1)
    config = ModelConfig(
        code_vocab_size=len(code_vocab),
        sum_vocab_size=len(sum_vocab),
        topic_count=4,
        n_topics=3,
        embed_dim=8,
        topic_embed_dim=4,
        hidden_dim=12,
        max_code_len=10,
        max_sum_len=8,
    )
    settings = dict(epochs=epochs, batch_size=3, seed=7)
    settings.update(train_overrides)
    return config, TrainConfig(**settings), instances


class TestTrainConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            TrainConfig(epochs=0)
        with pytest.raises(ConfigError):
            TrainConfig(adam_beta1=1.0)
        with pytest.raises(ConfigError):
            TrainConfig(learning_rate=-1e-3)
        with pytest.raises(ConfigError):
            TrainConfig(clip_norm=0.0)

    def test_zero_learning_rate_is_allowed(self):
        assert TrainConfig(learning_rate=0.0).learning_rate == 0.0


class TestAdam:
    def test_zero_gradient_leaves_parameters_untouched(self):
        p = Tensor(np.array([[1.0, -2.0]]), requires_grad=True)
        named = [("p", p)]
        state = AdamState.create(named)
        adam_step(named, {"p": np.zeros((1, 2))}, state, TrainConfig())
        np.testing.assert_array_equal(p.data, [[1.0, -2.0]])

    def test_first_step_hand_evaluated(self):
        # theta=1, g=1, lr=0.1: bias correction makes m_hat = v_hat = 1,
        # so theta' = 1 - 0.1 / (1 + eps).
        p = Tensor(np.array([[1.0]]), requires_grad=True)
        named = [("p", p)]
        state = AdamState.create(named)
        config = TrainConfig(learning_rate=0.1)
        adam_step(named, {"p": np.array([[1.0]])}, state, config)
        expected = 1.0 - 0.1 * (1.0 / (1.0 + config.adam_eps))
        assert p.data[0, 0] == pytest.approx(expected, abs=1e-12)

    def test_constant_gradient_moves_monotonically(self):
        p = Tensor(np.array([[0.0]]), requires_grad=True)
        named = [("p", p)]
        state = AdamState.create(named)
        config = TrainConfig(learning_rate=0.05)
        history = [p.data[0, 0]]
        for _ in range(10):
            adam_step(named, {"p": np.array([[2.5]])}, state, config)
            history.append(p.data[0, 0])
        diffs = np.diff(history)
        assert (diffs < 0).all()


class TestClipping:
    def test_large_gradients_are_scaled_to_the_budget(self):
        grads = {"a": np.full((2, 2), 10.0), "b": np.full((1, 3), -10.0)}
        norm = clip_by_global_norm(grads, clip_norm=5.0)
        assert norm > 5.0
        clipped = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        assert clipped == pytest.approx(5.0, rel=1e-12)

    def test_small_gradients_pass_through(self):
        grads = {"a": np.array([[0.3, 0.4]])}
        clip_by_global_norm(grads, clip_norm=5.0)
        np.testing.assert_array_equal(grads["a"], [[0.3, 0.4]])


class TestTrain:
    def test_empty_instances_is_an_error(self):
        config, train_config, _ = toy_setup()
        with pytest.raises(TrainingError):
            train(config, train_config, [])

    def test_same_seed_reproduces_the_loss_log(self):
        config, train_config, instances = toy_setup()
        _, log_a = train(config, train_config, instances)
        _, log_b = train(config, train_config, instances)
        assert log_a == log_b

    def test_loss_decreases_on_the_toy_corpus(self):
        config, train_config, instances = toy_setup(epochs=8)
        _, log = train(config, train_config, instances)
        assert log[-1][1] < log[0][1]

    def test_zero_learning_rate_keeps_parameters_bit_identical(self):
        config, train_config, instances = toy_setup(learning_rate=0.0)
        params, _ = train(config, train_config, instances)
        fresh = init_params(config, seed=train_config.seed, dtype=np.float32)
        for (_, trained), (_, initial) in zip(params.named(), fresh.named()):
            assert trained.data.tobytes() == initial.data.tobytes()

    def test_non_finite_loss_aborts_with_instance_index(self, monkeypatch):
        config, train_config, instances = toy_setup()
        real = training_module.forward_loss

        def poisoned(params, model_config, instance):
            out = real(params, model_config, instance)
            if instance.method_name == "m2":
                out.data = np.array([[np.nan]])
            return out

        monkeypatch.setattr(training_module, "forward_loss", poisoned)
        with pytest.raises(TrainingError) as excinfo:
            train(config, train_config, instances)
        assert "instance 2" in str(excinfo.value)

    def test_loss_log_csv_format(self, tmp_path):
        path = tmp_path / "loss.csv"
        write_loss_log(path, [(1, 3.5), (2, 2.25)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "epoch,mean_loss"
        assert lines[1] == "1,3.5"


class TestCheckpoint:
    def test_round_trip_preserves_forward_outputs_bitwise(self, tmp_path):
        config, train_config, instances = toy_setup()
        params, _ = train(config, train_config, instances, checkpoint_dir=tmp_path / "ckpt")
        loaded, loaded_config = load_checkpoint(tmp_path / "ckpt")
        for inst in instances:
            a = forward_loss(params, config, inst)
            b = forward_loss(loaded, loaded_config, inst)
            assert a.data.tobytes() == b.data.tobytes()

    def test_checkpoints_are_bit_identical_across_runs(self, tmp_path):
        config, train_config, instances = toy_setup()
        train(config, train_config, instances, checkpoint_dir=tmp_path / "a")
        train(config, train_config, instances, checkpoint_dir=tmp_path / "b")
        assert (tmp_path / "a" / "params.bin").read_bytes() == (
            tmp_path / "b" / "params.bin"
        ).read_bytes()

    def test_periodic_checkpoints_are_written(self, tmp_path):
        config, train_config, instances = toy_setup(epochs=4, checkpoint_every=2)
        train(config, train_config, instances, checkpoint_dir=tmp_path / "ckpt")
        assert (tmp_path / "ckpt" / "epoch_0002" / "params.bin").exists()
        assert (tmp_path / "ckpt" / "epoch_0004" / "params.bin").exists()
        assert (tmp_path / "ckpt" / "params.bin").exists()

    def test_shape_mismatch_is_rejected(self, tmp_path):
        import json

        config, _, _ = toy_setup()
        params = init_params(config, seed=0, dtype=np.float32)
        save_checkpoint(tmp_path / "ckpt", params, config)
        manifest_path = tmp_path / "ckpt" / "manifest.json"
        manifest = json.loads(manifest_path.read_text())
        entry = next(e for e in manifest["params"] if e["name"] == "attn_score")
        entry["shape"] = list(reversed(entry["shape"]))
        manifest_path.write_text(json.dumps(manifest))
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "ckpt")

    def test_missing_parameter_is_rejected(self, tmp_path):
        import json

        config, _, _ = toy_setup()
        params = init_params(config, seed=0, dtype=np.float32)
        save_checkpoint(tmp_path / "ckpt", params, config)
        manifest_path = tmp_path / "ckpt" / "manifest.json"
        manifest = json.loads(manifest_path.read_text())
        manifest["params"] = manifest["params"][:-1]
        manifest_path.write_text(json.dumps(manifest))
        with pytest.raises(CheckpointError) as excinfo:
            load_checkpoint(tmp_path / "ckpt")
        assert "missing" in str(excinfo.value)

    def test_blob_is_float32_little_endian(self, tmp_path):
        config, _, _ = toy_setup()
        params = init_params(config, seed=0, dtype=np.float32)
        save_checkpoint(tmp_path / "ckpt", params, config)
        blob = (tmp_path / "ckpt" / "params.bin").read_bytes()
        total = sum(t.data.size for t in params.tensors())
        assert len(blob) == 4 * total
        first = params.named()[0]
        arr = np.frombuffer(blob, dtype="<f4", count=first[1].data.size)
        np.testing.assert_array_equal(
            arr.reshape(first[1].data.shape), first[1].data
        )
