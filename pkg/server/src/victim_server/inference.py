"""Portable float64 inference from an exported weight document.

The serving path never touches torch: weights load from JSON into numpy and
the forward pass runs in double precision, so the served labels are a pure
function of the weight file and the request graph.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class InferenceError(ValueError):
    pass


class WeightBundle:
    def __init__(self, doc: dict):
        try:
            self.input_dim = int(doc["input_dim"])
            self.num_classes = int(doc["num_classes"])
            self.layers = [
                (
                    float(layer["eps"]),
                    [
                        (
                            np.asarray(sub["weight"], dtype=np.float64),
                            np.asarray(sub["bias"], dtype=np.float64),
                        )
                        for sub in layer["mlp"]
                    ],
                )
                for layer in doc["layers"]
            ]
            self.readout = (
                np.asarray(doc["readout"]["weight"], dtype=np.float64),
                np.asarray(doc["readout"]["bias"], dtype=np.float64),
            )
        except (KeyError, TypeError) as exc:
            raise InferenceError(f"invalid weight document: {exc}") from exc
        self.metadata = dict(doc.get("metadata", {}))
        self._check()

    def _check(self):
        width = self.input_dim
        for li, (_, mlp) in enumerate(self.layers):
            for si, (w, b) in enumerate(mlp):
                if w.ndim != 2 or w.shape[1] != width or b.shape != (w.shape[0],):
                    raise InferenceError(f"layer {li} sublayer {si}: shape break at width {width}")
                width = w.shape[0]
        w, b = self.readout
        if w.shape != (self.num_classes, width) or b.shape != (self.num_classes,):
            raise InferenceError("readout shapes do not close the chain")

    @classmethod
    def load(cls, path: str | Path) -> "WeightBundle":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def scores(self, adjacency: np.ndarray, features: np.ndarray) -> np.ndarray:
        if features.shape[1] != self.input_dim:
            raise InferenceError(
                f"graph feature width {features.shape[1]} != input_dim {self.input_dim}"
            )
        h = features
        for eps, mlp in self.layers:
            z = (1.0 + eps) * h + adjacency @ h
            for si, (w, b) in enumerate(mlp):
                if si > 0:
                    z = np.maximum(z, 0.0)
                z = z @ w.T + b
            h = z
        pooled = h.sum(axis=0)
        w, b = self.readout
        return pooled @ w.T + b

    def predict(self, adjacency: np.ndarray, features: np.ndarray) -> int:
        return int(np.argmax(self.scores(adjacency, features)))


def graph_from_request(obj: dict) -> tuple[np.ndarray, np.ndarray]:
    """Dense (adjacency, features) from a wire-protocol graph object."""
    try:
        n = int(obj["num_nodes"])
        edges = obj["edges"]
        feats = np.asarray(obj["node_features"], dtype=np.float64)
    except (KeyError, TypeError) as exc:
        raise InferenceError(f"bad graph object: {exc}") from exc
    if n < 1:
        raise InferenceError("graph must have at least one node")
    if feats.ndim != 2 or feats.shape[0] != n:
        raise InferenceError("node_features must be an N x d matrix")
    adj = np.zeros((n, n))
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise InferenceError(f"bad edge ({u}, {v})")
        adj[u, v] = adj[v, u] = 1.0
    return adj, feats
