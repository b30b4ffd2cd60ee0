"""Parser for the TU plain-text graph dataset exchange format.

A dataset ``NAME`` rooted at some directory consists of:

    NAME_A.txt                edge list, 1-indexed "row, col" global node ids
    NAME_graph_indicator.txt  graph id (1-indexed) of each node, one per line
    NAME_graph_labels.txt     raw class label of each graph, one per line
    NAME_node_labels.txt      optional categorical node labels (one-hot expanded)
    NAME_node_attributes.txt  optional comma-separated real node attributes

Edge lines usually come in directed duplicate pairs; either a pair or a single
line yields one undirected edge.  Raw graph labels are remapped to a dense
0-based range following the sorted order of the distinct raw values.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .graphs import Dataset, Graph, GraphError


class TUFormatError(GraphError):
    """Raised when dataset files are missing or malformed."""


def _data_lines(path: Path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def _parse_int(text: str, path: Path, lineno: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise TUFormatError(f"{path.name}:{lineno}: expected integer, got {text.strip()!r}") from None


def parse_tu_dataset(root_path: str | os.PathLike, name: str) -> Dataset:
    """Parse the TU-format dataset ``name`` under ``root_path``.

    Nodes are renumbered 0-based within each graph.  When neither node-label
    nor node-attribute file exists, every node gets the single feature [1.0].
    """
    root = Path(root_path)
    a_path = root / f"{name}_A.txt"
    ind_path = root / f"{name}_graph_indicator.txt"
    lab_path = root / f"{name}_graph_labels.txt"
    for p in (a_path, ind_path, lab_path):
        if not p.is_file():
            raise TUFormatError(f"missing mandatory file {p}")

    # node -> graph assignment (both 1-indexed in the files)
    node_graph = [
        _parse_int(t, ind_path, i + 1) for i, t in enumerate(_data_lines(ind_path))
    ]
    num_nodes_total = len(node_graph)
    if num_nodes_total == 0:
        raise TUFormatError(f"{ind_path.name}: no nodes")
    num_graphs = max(node_graph)

    raw_labels = [_parse_int(t, lab_path, i + 1) for i, t in enumerate(_data_lines(lab_path))]
    if len(raw_labels) != num_graphs:
        raise TUFormatError(
            f"{lab_path.name}: {len(raw_labels)} labels for {num_graphs} graphs"
        )

    # local node index and per-graph node count
    graph_size = [0] * num_graphs
    local_index = [0] * num_nodes_total
    for node, gid in enumerate(node_graph):
        if not (1 <= gid <= num_graphs):
            raise TUFormatError(f"{ind_path.name}:{node + 1}: graph id {gid} out of range")
        local_index[node] = graph_size[gid - 1]
        graph_size[gid - 1] += 1
    for gid, size in enumerate(graph_size, start=1):
        if size == 0:
            raise TUFormatError(f"graph {gid} has no nodes")

    # edges, collapsing directed duplicates
    edge_sets: list[set[tuple[int, int]]] = [set() for _ in range(num_graphs)]
    for lineno, line in enumerate(_data_lines(a_path), start=1):
        parts = line.split(",")
        if len(parts) != 2:
            raise TUFormatError(f"{a_path.name}:{lineno}: expected 'row, col', got {line!r}")
        u = _parse_int(parts[0], a_path, lineno)
        v = _parse_int(parts[1], a_path, lineno)
        if not (1 <= u <= num_nodes_total and 1 <= v <= num_nodes_total):
            raise TUFormatError(f"{a_path.name}:{lineno}: node id out of range")
        if u == v:
            raise TUFormatError(f"{a_path.name}:{lineno}: self-loop at node {u}")
        gu, gv = node_graph[u - 1], node_graph[v - 1]
        if gu != gv:
            raise TUFormatError(
                f"{a_path.name}:{lineno}: edge ({u}, {v}) crosses graphs {gu} and {gv}"
            )
        a, b = local_index[u - 1], local_index[v - 1]
        edge_sets[gu - 1].add((a, b) if a < b else (b, a))

    features, feature_kind = _node_features(root, name, node_graph, local_index, graph_size)

    label_map = {raw: i for i, raw in enumerate(sorted(set(raw_labels)))}
    graphs = [
        Graph(graph_size[i], edge_sets[i], features[i], label_map[raw_labels[i]])
        for i in range(num_graphs)
    ]
    # a file with one observed label still describes a classification task
    return Dataset(graphs, num_classes=max(2, len(label_map)), name=name, feature_kind=feature_kind)


def _node_features(root, name, node_graph, local_index, graph_size):
    """Per-graph feature matrices plus the dataset feature kind."""
    attr_path = root / f"{name}_node_attributes.txt"
    nlab_path = root / f"{name}_node_labels.txt"
    num_graphs = len(graph_size)

    if attr_path.is_file():
        rows = []
        for lineno, line in enumerate(_data_lines(attr_path), start=1):
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError:
                raise TUFormatError(f"{attr_path.name}:{lineno}: bad attribute row {line!r}") from None
        if len(rows) != len(node_graph):
            raise TUFormatError(f"{attr_path.name}: {len(rows)} rows for {len(node_graph)} nodes")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise TUFormatError(f"{attr_path.name}: inconsistent attribute width")
        mats = [np.zeros((graph_size[i], width)) for i in range(num_graphs)]
        for node, row in enumerate(rows):
            mats[node_graph[node] - 1][local_index[node]] = row
        return mats, "integer_vector"

    if nlab_path.is_file():
        labels = [
            _parse_int(t, nlab_path, i + 1) for i, t in enumerate(_data_lines(nlab_path))
        ]
        if len(labels) != len(node_graph):
            raise TUFormatError(f"{nlab_path.name}: {len(labels)} labels for {len(node_graph)} nodes")
        if min(labels) < 0:
            raise TUFormatError(f"{nlab_path.name}: negative node label")
        width = max(labels) + 1
        mats = [np.zeros((graph_size[i], width)) for i in range(num_graphs)]
        for node, lab in enumerate(labels):
            mats[node_graph[node] - 1][local_index[node], lab] = 1.0
        return mats, "one_hot"

    mats = [np.ones((graph_size[i], 1)) for i in range(num_graphs)]
    return mats, "constant_one"
