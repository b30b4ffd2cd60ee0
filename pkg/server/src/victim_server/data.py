"""Minimal TU exchange-format reader for training.

Returns dense per-graph tensors; node labels expand to one-hot rows, node
attributes load as real rows, and datasets without either get the constant
feature [1.0].  Graph labels remap to 0-based ids in sorted raw order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    pass


@dataclass
class GraphSample:
    adjacency: np.ndarray  # n x n symmetric 0/1
    features: np.ndarray  # n x d
    label: int


@dataclass
class GraphData:
    samples: list[GraphSample]
    num_classes: int
    input_dim: int


def _lines(path: Path) -> list[str]:
    return [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]


def load_tu(root: str | Path, name: str) -> GraphData:
    root = Path(root)
    for suffix in ("A", "graph_indicator", "graph_labels"):
        if not (root / f"{name}_{suffix}.txt").is_file():
            raise DataError(f"missing {name}_{suffix}.txt under {root}")

    node_graph = [int(x) for x in _lines(root / f"{name}_graph_indicator.txt")]
    raw_labels = [int(x) for x in _lines(root / f"{name}_graph_labels.txt")]
    num_graphs = max(node_graph)
    if len(raw_labels) != num_graphs:
        raise DataError("graph label count does not match the indicator")

    sizes = [0] * num_graphs
    local = []
    for gid in node_graph:
        local.append(sizes[gid - 1])
        sizes[gid - 1] += 1

    feats = _features(root, name, node_graph, local, sizes)
    adjs = [np.zeros((n, n)) for n in sizes]
    for ln in _lines(root / f"{name}_A.txt"):
        u_s, v_s = ln.split(",")
        u, v = int(u_s), int(v_s)
        gid = node_graph[u - 1]
        if gid != node_graph[v - 1]:
            raise DataError(f"edge ({u}, {v}) crosses graphs")
        a, b = local[u - 1], local[v - 1]
        adjs[gid - 1][a, b] = adjs[gid - 1][b, a] = 1.0

    label_map = {raw: i for i, raw in enumerate(sorted(set(raw_labels)))}
    samples = [
        GraphSample(adjs[i], feats[i], label_map[raw_labels[i]]) for i in range(num_graphs)
    ]
    return GraphData(samples, max(2, len(label_map)), samples[0].features.shape[1])


def _features(root: Path, name: str, node_graph, local, sizes):
    attr = root / f"{name}_node_attributes.txt"
    nlab = root / f"{name}_node_labels.txt"
    if attr.is_file():
        rows = [[float(x) for x in ln.split(",")] for ln in _lines(attr)]
        width = len(rows[0])
        mats = [np.zeros((n, width)) for n in sizes]
        for node, row in enumerate(rows):
            mats[node_graph[node] - 1][local[node]] = row
        return mats
    if nlab.is_file():
        labels = [int(x) for x in _lines(nlab)]
        width = max(labels) + 1
        mats = [np.zeros((n, width)) for n in sizes]
        for node, lab in enumerate(labels):
            mats[node_graph[node] - 1][local[node], lab] = 1.0
        return mats
    return [np.ones((n, 1)) for n in sizes]
