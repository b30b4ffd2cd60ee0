"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from nodeinject.graphs import Dataset, Graph


def path_graph(n: int, label: int | None = None, d: int = 1) -> Graph:
    return Graph(n, {(i, i + 1) for i in range(n - 1)}, np.ones((n, d)), label)


def star_graph(leaves: int, label: int | None = None) -> Graph:
    return Graph(leaves + 1, {(0, i) for i in range(1, leaves + 1)}, np.ones((leaves + 1, 1)), label)


def triangle_graph(label: int | None = None) -> Graph:
    return Graph(3, {(0, 1), (1, 2), (0, 2)}, np.ones((3, 1)), label)


def isolated_graph(n: int, label: int | None = None) -> Graph:
    return Graph(n, set(), np.ones((n, 1)), label)


def random_graph(rng, n: int, p: float = 0.3, d: int = 1) -> Graph:
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p}
    return Graph(n, edges, np.asarray(rng.random((n, d))))


def synthetic_degree_corpus(seed: int = 42, chains: int = 40, matchings: int = 42, hubs: int = 38) -> Dataset:
    """2-class corpus, 8-20 nodes, ground truth label = (max degree >= 4).

    Three structural families: chains (max degree 2-3, flip immediately under
    mode initialization), matchings (max degree 1, need real optimization),
    and hubs (max degree >= 4, label 1, unattackable because original edges
    are out of reach).
    """
    rng = np.random.default_rng(seed)
    kinds = ["chain"] * chains + ["matching"] * matchings + ["hub"] * hubs
    rng.shuffle(kinds)
    graphs = []
    for kind in kinds:
        if kind == "matching":
            n = int(rng.integers(10, 21))
            edges = {(2 * i, 2 * i + 1) for i in range(n // 2)}
        elif kind == "chain":
            n = int(rng.integers(8, 21))
            edges = {(i, i + 1) for i in range(n - 1)}
            if n >= 5 and rng.random() < 0.5:
                edges.add((1, int(rng.integers(3, n))))
        else:
            n = int(rng.integers(8, 21))
            spokes = rng.choice(np.arange(1, n), size=int(rng.integers(4, min(7, n - 1) + 1)), replace=False)
            edges = {(0, int(s)) for s in spokes}
        g = Graph(n, edges, np.ones((n, 1)))
        graphs.append(g.with_label(1 if g.degrees().max() >= 4 else 0))
    return Dataset(graphs, 2, "synthetic-degree", "constant_one")


def write_tu_fixture(
    root,
    name: str,
    edges_lines,
    indicator_lines,
    label_lines,
    node_labels=None,
    node_attributes=None,
) -> None:
    root.mkdir(parents=True, exist_ok=True)

    def dump(suffix, lines):
        (root / f"{name}_{suffix}.txt").write_text("\n".join(str(x) for x in lines) + "\n")

    dump("A", edges_lines)
    dump("graph_indicator", indicator_lines)
    dump("graph_labels", label_lines)
    if node_labels is not None:
        dump("node_labels", node_labels)
    if node_attributes is not None:
        dump("node_attributes", node_attributes)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
