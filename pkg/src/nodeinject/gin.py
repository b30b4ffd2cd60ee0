"""Graph isomorphism network inference from an exported weight file.

The built-in victim evaluates a GIN whose weights arrive as a single JSON
document: per layer an ``eps`` and a two-sublayer perceptron, plus a linear
readout applied to the sum-pooled final-layer embeddings.  Each layer maps

    h_v  <-  mlp((1 + eps) * h_v + sum of neighbor embeddings)

with a rectified-linear activation between the perceptron sublayers.  Argmax
ties break toward the smallest class index, so inference is deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graphs import Graph


class WeightFormatError(ValueError):
    """Raised when a weight file is malformed or its shapes do not chain."""


@dataclass(frozen=True)
class LinearWeights:
    weight: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class GinLayer:
    eps: float
    mlp: tuple[LinearWeights, ...]


@dataclass(frozen=True)
class GinWeights:
    input_dim: int
    num_classes: int
    layers: tuple[GinLayer, ...]
    readout: LinearWeights
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.num_classes < 2:
            raise WeightFormatError(f"num_classes must be >= 2, got {self.num_classes}")
        if not self.layers:
            raise WeightFormatError("at least one GIN layer required")
        width = self.input_dim
        for li, layer in enumerate(self.layers):
            if not layer.mlp:
                raise WeightFormatError(f"layer {li} has an empty mlp")
            for si, lin in enumerate(layer.mlp):
                if lin.weight.ndim != 2 or lin.bias.ndim != 1:
                    raise WeightFormatError(f"layer {li} sublayer {si}: bad tensor rank")
                if lin.in_dim != width:
                    raise WeightFormatError(
                        f"layer {li} sublayer {si}: expects input {lin.in_dim}, got {width}"
                    )
                if lin.bias.shape[0] != lin.out_dim:
                    raise WeightFormatError(f"layer {li} sublayer {si}: bias/weight mismatch")
                width = lin.out_dim
        if self.readout.in_dim != width:
            raise WeightFormatError(
                f"readout expects input {self.readout.in_dim}, final embedding is {width}"
            )
        if self.readout.out_dim != self.num_classes:
            raise WeightFormatError(
                f"readout emits {self.readout.out_dim} scores for {self.num_classes} classes"
            )


def _linear_from_json(obj: dict, where: str) -> LinearWeights:
    try:
        w = np.asarray(obj["weight"], dtype=np.float64)
        b = np.asarray(obj["bias"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise WeightFormatError(f"{where}: missing weight/bias") from exc
    return LinearWeights(w, b)


def weights_from_json_dict(obj: dict) -> GinWeights:
    try:
        layers = tuple(
            GinLayer(
                eps=float(layer["eps"]),
                mlp=tuple(
                    _linear_from_json(sub, f"layer {li} sublayer {si}")
                    for si, sub in enumerate(layer["mlp"])
                ),
            )
            for li, layer in enumerate(obj["layers"])
        )
        return GinWeights(
            input_dim=int(obj["input_dim"]),
            num_classes=int(obj["num_classes"]),
            layers=layers,
            readout=_linear_from_json(obj["readout"], "readout"),
            metadata=dict(obj.get("metadata", {})),
        )
    except (KeyError, TypeError) as exc:
        raise WeightFormatError(f"invalid weight document: {exc}") from exc


def weights_to_json_dict(w: GinWeights) -> dict:
    return {
        "input_dim": w.input_dim,
        "num_classes": w.num_classes,
        "layers": [
            {
                "eps": layer.eps,
                "mlp": [
                    {"weight": lin.weight.tolist(), "bias": lin.bias.tolist()}
                    for lin in layer.mlp
                ],
            }
            for layer in w.layers
        ],
        "readout": {"weight": w.readout.weight.tolist(), "bias": w.readout.bias.tolist()},
        "metadata": w.metadata,
    }


def load_weights(path: str | Path) -> GinWeights:
    with open(path, "r", encoding="utf-8") as fh:
        return weights_from_json_dict(json.load(fh))


def save_weights(w: GinWeights, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(weights_to_json_dict(w), fh)


def gin_embed(w: GinWeights, g: Graph) -> np.ndarray:
    """Class scores for ``g`` (pre-argmax), used by :func:`gin_predict`."""
    if g.feature_dim != w.input_dim:
        raise WeightFormatError(
            f"graph feature width {g.feature_dim} != model input_dim {w.input_dim}"
        )
    h = g.node_features
    adj = g.neighbors()
    for layer in w.layers:
        agg = np.zeros_like(h)
        for v, nbrs in enumerate(adj):
            if nbrs:
                agg[v] = h[nbrs].sum(axis=0)
        z = (1.0 + layer.eps) * h + agg
        for si, lin in enumerate(layer.mlp):
            if si > 0:
                z = np.maximum(z, 0.0)
            z = z @ lin.weight.T + lin.bias
        h = z
    pooled = h.sum(axis=0)
    return pooled @ w.readout.weight.T + w.readout.bias


def gin_predict(w: GinWeights, g: Graph) -> int:
    """Hard label for ``g``; ties break toward the smallest class index."""
    return int(np.argmax(gin_embed(w, g)))


class GinVictim:
    """Victim oracle backed by an exported GIN weight file."""

    def __init__(self, weights: GinWeights):
        self.weights = weights

    @classmethod
    def from_file(cls, path: str | Path) -> "GinVictim":
        return cls(load_weights(path))

    def predict(self, g: Graph) -> int:
        return gin_predict(self.weights, g)

    def num_classes(self) -> int:
        return self.weights.num_classes
