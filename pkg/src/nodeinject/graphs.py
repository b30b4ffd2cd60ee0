"""Undirected attributed graphs and graph collections.

A :class:`Graph` is the unit of attack: an undirected simple graph with a
dense node feature matrix and an optional class label.  Graphs are immutable
after construction so they can be shared freely between concurrent attack
workers.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional, Sequence

import numpy as np

FEATURE_KINDS = ("integer_vector", "one_hot", "constant_one")

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised when a graph or dataset violates its structural invariants."""


def _canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Undirected simple graph with node features and an optional label.

    Edges are stored as a frozenset of (u, v) pairs with u < v, so adjacency
    is symmetric by construction and duplicates collapse.  ``node_features``
    is an N x d float array, marked read-only.
    """

    __slots__ = ("num_nodes", "edges", "node_features", "label")

    def __init__(
        self,
        num_nodes: int,
        edges: Iterable[Edge],
        node_features: np.ndarray,
        label: Optional[int] = None,
        *,
        validate: bool = True,
    ):
        self.num_nodes = int(num_nodes)
        self.edges: frozenset[Edge] = (
            edges if isinstance(edges, frozenset) else frozenset(_canonical_edge(u, v) for u, v in edges)
        )
        feats = np.asarray(node_features, dtype=np.float64)
        if feats.ndim != 2:
            raise GraphError(f"node_features must be 2-D, got shape {feats.shape}")
        feats.setflags(write=False)
        self.node_features = feats
        self.label = None if label is None else int(label)
        if validate:
            self._check()

    def _check(self) -> None:
        if self.num_nodes < 1:
            raise GraphError("graph must have at least one node")
        if self.node_features.shape[0] != self.num_nodes:
            raise GraphError(
                f"feature rows ({self.node_features.shape[0]}) != num_nodes ({self.num_nodes})"
            )
        if self.node_features.shape[1] < 1:
            raise GraphError("feature width must be >= 1")
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise GraphError(f"edge ({u}, {v}) out of range for {self.num_nodes} nodes")
            if u > v:
                raise GraphError(f"edge ({u}, {v}) not canonical")
        if self.label is not None and self.label < 0:
            raise GraphError(f"label must be >= 0, got {self.label}")

    @property
    def feature_dim(self) -> int:
        return self.node_features.shape[1]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _canonical_edge(u, v) in self.edges

    def degrees(self) -> np.ndarray:
        """Degree of every node as an int array."""
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        """Adjacency lists (each neighbor listed once)."""
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def with_label(self, label: int) -> "Graph":
        return Graph(self.num_nodes, self.edges, self.node_features, label, validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and self.edges == other.edges
            and self.label == other.label
            and np.array_equal(self.node_features, other.node_features)
        )

    def __repr__(self) -> str:
        return (
            f"Graph(num_nodes={self.num_nodes}, num_edges={len(self.edges)}, "
            f"d={self.feature_dim}, label={self.label})"
        )


def degree(g: Graph, v: int) -> int:
    """Number of edges incident to node ``v``."""
    if not (0 <= v < g.num_nodes):
        raise GraphError(f"node index {v} out of range for {g.num_nodes} nodes")
    return sum(1 for (a, b) in g.edges if a == v or b == v)


class Dataset:
    """Ordered collection of graphs sharing a feature space."""

    __slots__ = ("graphs", "num_classes", "name", "feature_kind")

    def __init__(self, graphs: Sequence[Graph], num_classes: int, name: str, feature_kind: str):
        self.graphs = list(graphs)
        self.num_classes = int(num_classes)
        self.name = name
        self.feature_kind = feature_kind
        self._check()

    def _check(self) -> None:
        if self.num_classes < 2:
            raise GraphError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.feature_kind not in FEATURE_KINDS:
            raise GraphError(f"unknown feature_kind {self.feature_kind!r}")
        if not self.graphs:
            return
        d = self.graphs[0].feature_dim
        for i, g in enumerate(self.graphs):
            if g.feature_dim != d:
                raise GraphError(f"graph {i} has feature width {g.feature_dim}, expected {d}")
            if g.label is not None and not (0 <= g.label < self.num_classes):
                raise GraphError(f"graph {i} label {g.label} outside [0, {self.num_classes})")
            if self.feature_kind == "one_hot":
                feats = g.node_features
                ones = (feats == 1.0).sum(axis=1)
                if not (np.all(ones == 1) and np.all((feats == 0.0) | (feats == 1.0))):
                    raise GraphError(f"graph {i} rows are not one-hot")

    @property
    def feature_dim(self) -> int:
        if not self.graphs:
            raise GraphError("empty dataset has no feature width")
        return self.graphs[0].feature_dim

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset([self.graphs[i] for i in indices], self.num_classes, self.name, self.feature_kind)


def sorted_edges(g: Graph) -> list[list[int]]:
    return sorted([u, v] for u, v in g.edges)


def graph_to_json_dict(g: Graph, include_label: bool = True) -> dict:
    """JSON-schema dict: edges listed u < v in lexicographic order."""
    d = {
        "num_nodes": g.num_nodes,
        "edges": sorted_edges(g),
        "node_features": g.node_features.tolist(),
    }
    if include_label:
        d["label"] = g.label
    return d


def graph_from_json_dict(d: dict) -> Graph:
    label = d.get("label")
    return Graph(
        d["num_nodes"],
        [(int(u), int(v)) for u, v in d["edges"]],
        np.asarray(d["node_features"], dtype=np.float64),
        label,
    )


def graph_from_json(text: str) -> Graph:
    return graph_from_json_dict(json.loads(text))


def export_graph(g: Graph, marked_nodes: Iterable[int] = (), format: str = "dot") -> str:
    """Render ``g`` as deterministic DOT or JSON text.

    ``marked_nodes`` (typically the injected nodes) are drawn with a distinct
    fill color in DOT output.  JSON output round-trips through
    :func:`graph_from_json`.
    """
    marked = set(marked_nodes)
    for v in marked:
        if not (0 <= v < g.num_nodes):
            raise GraphError(f"marked node {v} out of range")
    if format == "json":
        return json.dumps(graph_to_json_dict(g))
    if format != "dot":
        raise GraphError(f"unknown export format {format!r}")
    lines = ["graph G {"]
    for v in range(g.num_nodes):
        if v in marked:
            lines.append(f"  {v} [style=filled, fillcolor=lightcoral];")
        else:
            lines.append(f"  {v};")
    for u, v in sorted(g.edges):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
