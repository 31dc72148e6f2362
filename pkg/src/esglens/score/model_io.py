"""Versioned binary persistence for trained regressors.

Layout: magic, version, model kind, a JSON block echoing the training
config, a JSON block of structural metadata, the raw little-endian float32
parameter payload, and a trailing SHA-256 checksum of everything after the
magic. MLP weights reload as float32 (documented precision loss at the
serialization boundary); tree structure and bin edges round-trip exactly.
"""

from __future__ import annotations

import hashlib
import io
import json
import struct
from dataclasses import asdict
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from ..errors import CorruptIndexFileError, IoFailureError
from .gbt import GbtConfig, GbtModel, _Node
from .mlp import MlpConfig, MlpModel

MODEL_MAGIC = b"ESGLMDL1"
MODEL_VERSION = 1


def _node_to_dict(node: _Node) -> dict:
    if node.is_leaf:
        return {"v": node.value}
    return {"v": node.value, "f": node.feature, "t": node.bin_threshold,
            "l": _node_to_dict(node.left), "r": _node_to_dict(node.right)}


def _node_from_dict(data: dict) -> _Node:
    if "f" not in data:
        return _Node(value=data["v"])
    return _Node(value=data["v"], feature=data["f"], bin_threshold=data["t"],
                 left=_node_from_dict(data["l"]), right=_node_from_dict(data["r"]))


def _write_block(buffer: io.BytesIO, blob: bytes) -> None:
    buffer.write(struct.pack("<I", len(blob)))
    buffer.write(blob)


def _read_block(view: io.BytesIO) -> bytes:
    (length,) = struct.unpack("<I", view.read(4))
    return view.read(length)


def save_model(model: Union[MlpModel, GbtModel], path: str | Path) -> None:
    buffer = io.BytesIO()
    buffer.write(struct.pack("<I", MODEL_VERSION))
    if isinstance(model, MlpModel):
        buffer.write(b"M")
        _write_block(buffer, json.dumps(asdict(model.config),
                                        sort_keys=True).encode("utf-8"))
        meta = {"shapes": [list(w.shape) for w in model.weights]}
        _write_block(buffer, json.dumps(meta, sort_keys=True).encode("utf-8"))
        for arr in (*model.weights, *model.biases):
            _write_block(buffer, np.asarray(arr, dtype="<f4").tobytes())
    elif isinstance(model, GbtModel):
        buffer.write(b"G")
        _write_block(buffer, json.dumps(asdict(model.config),
                                        sort_keys=True).encode("utf-8"))
        meta = {
            "base": model.base_prediction,
            "n_features": model.n_features,
            "trees": [_node_to_dict(t) for t in model.trees],
            "edges": [[float(e) for e in edges] for edges in model.edges],
        }
        _write_block(buffer, json.dumps(meta, sort_keys=True).encode("utf-8"))
    else:
        raise TypeError(f"unsupported model type {type(model)!r}")
    payload = buffer.getvalue()
    digest = hashlib.sha256(payload).digest()
    try:
        with open(path, "wb") as fh:
            fh.write(MODEL_MAGIC)
            fh.write(payload)
            fh.write(digest)
    except OSError as exc:
        raise IoFailureError(f"cannot write model: {exc}") from exc


def load_model(path: str | Path) -> Tuple[str, Union[MlpModel, GbtModel]]:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailureError(f"cannot read model: {exc}") from exc
    if len(blob) < len(MODEL_MAGIC) + 32 or blob[:len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise CorruptIndexFileError("bad model magic")
    payload, digest = blob[len(MODEL_MAGIC):-32], blob[-32:]
    if hashlib.sha256(payload).digest() != digest:
        raise CorruptIndexFileError("model checksum mismatch")
    view = io.BytesIO(payload)
    (version,) = struct.unpack("<I", view.read(4))
    if version != MODEL_VERSION:
        raise CorruptIndexFileError(f"unsupported model version {version}")
    kind = view.read(1)
    config_raw = json.loads(_read_block(view).decode("utf-8"))
    meta = json.loads(_read_block(view).decode("utf-8"))
    if kind == b"M":
        config_raw["hidden_dims"] = tuple(config_raw["hidden_dims"])
        config = MlpConfig(**config_raw)
        weights: List[np.ndarray] = []
        biases: List[np.ndarray] = []
        for shape in meta["shapes"]:
            data = np.frombuffer(_read_block(view), dtype="<f4")
            weights.append(data.reshape(shape).astype(np.float64))
        for shape in meta["shapes"]:
            data = np.frombuffer(_read_block(view), dtype="<f4")
            biases.append(data.astype(np.float64))
        return "mlp", MlpModel(config=config, weights=weights, biases=biases)
    if kind == b"G":
        config = GbtConfig(**config_raw)
        trees = [_node_from_dict(t) for t in meta["trees"]]
        edges = [np.asarray(e, dtype=np.float64) for e in meta["edges"]]
        return "gbt", GbtModel(config=config, base_prediction=meta["base"],
                               trees=trees, edges=edges,
                               n_features=meta["n_features"])
    raise CorruptIndexFileError(f"unknown model kind {kind!r}")
