"""Checkpoint persistence: a JSON manifest describing parameter layout
plus one raw little-endian float32 blob. Loading validates every shape
against the configuration stored in the manifest."""

import json
from pathlib import Path

import numpy as np

from topicsum.errors import CheckpointError
from topicsum.model import ModelConfig, ModelParams, param_shapes, params_from_dict
from topicsum.neuro.tape import Tensor

MANIFEST_NAME = "manifest.json"
BLOB_NAME = "params.bin"
_FLOAT = np.dtype("<f4")


def save_checkpoint(
    directory: str | Path, params: ModelParams, config: ModelConfig
) -> Path:
    """Write manifest.json and params.bin into directory; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    chunks = []
    offset = 0
    for name, tensor in params.named():
        raw = np.ascontiguousarray(tensor.data, dtype=_FLOAT).tobytes()
        entries.append(
            {"name": name, "shape": list(tensor.data.shape), "offset": offset}
        )
        chunks.append(raw)
        offset += len(raw)
    manifest = {
        "config": config.as_dict(),
        "params": entries,
        "blob": BLOB_NAME,
        "total_bytes": offset,
    }
    manifest_path = directory / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest, indent=1), encoding="utf-8")
    (directory / BLOB_NAME).write_bytes(b"".join(chunks))
    return manifest_path


def load_checkpoint(path: str | Path) -> tuple[ModelParams, ModelConfig]:
    """Load a checkpoint directory (or manifest path) back into float32 params."""
    path = Path(path)
    manifest_path = path / MANIFEST_NAME if path.is_dir() else path
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint manifest {manifest_path}: {exc}") from exc
    try:
        config = ModelConfig(**manifest["config"])
        entries = manifest["params"]
        blob_name = manifest["blob"]
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"checkpoint manifest {manifest_path} is malformed") from exc
    blob = (manifest_path.parent / blob_name).read_bytes()
    expected = dict(param_shapes(config))
    tensors: dict[str, Tensor] = {}
    for entry in entries:
        name = entry["name"]
        shape = tuple(entry["shape"])
        if name not in expected:
            raise CheckpointError(f"unexpected parameter {name!r} in checkpoint")
        if shape != expected[name]:
            raise CheckpointError(
                f"parameter {name!r} has shape {shape}, expected {expected[name]}"
            )
        count = shape[0] * shape[1]
        start = entry["offset"]
        end = start + count * _FLOAT.itemsize
        if end > len(blob):
            raise CheckpointError(f"parameter {name!r} overruns the blob")
        data = np.frombuffer(blob, dtype=_FLOAT, count=count, offset=start)
        tensor = Tensor(data.reshape(shape).copy(), requires_grad=True)
        tensors[name] = tensor
    missing = set(expected) - set(tensors)
    if missing:
        raise CheckpointError(f"checkpoint is missing parameters: {sorted(missing)}")
    return params_from_dict(tensors), config
