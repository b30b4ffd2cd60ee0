"""Synthetic TU-format corpora for trainer and protocol tests."""

from __future__ import annotations

import numpy as np
import pytest


def _write(root, name, edge_lines, indicator, labels, node_labels=None):
    root.mkdir(parents=True, exist_ok=True)
    (root / f"{name}_A.txt").write_text("\n".join(edge_lines) + "\n")
    (root / f"{name}_graph_indicator.txt").write_text("\n".join(indicator) + "\n")
    (root / f"{name}_graph_labels.txt").write_text("\n".join(labels) + "\n")
    if node_labels is not None:
        (root / f"{name}_node_labels.txt").write_text("\n".join(node_labels) + "\n")


def _emit(edge_lines, offset, pairs):
    for u, v in pairs:
        edge_lines.append(f"{offset + u + 1}, {offset + v + 1}")
        edge_lines.append(f"{offset + v + 1}, {offset + u + 1}")


def write_star_path_corpus(root, name="TINY", count=60, seed=0):
    """Trivially separable 2-class task: stars (label 2) vs paths (label 1)."""
    rng = np.random.default_rng(seed)
    edge_lines, indicator, labels = [], [], []
    offset = 0
    for gid in range(1, count + 1):
        n = int(rng.integers(6, 12))
        star = gid % 2 == 0
        labels.append("2" if star else "1")
        indicator.extend([str(gid)] * n)
        if star:
            pairs = [(0, j) for j in range(1, n)]
        else:
            pairs = [(j, j + 1) for j in range(n - 1)]
        _emit(edge_lines, offset, pairs)
        offset += n
    _write(root, name, edge_lines, indicator, labels)
    return root


def random_tree(rng, n):
    return [(int(rng.integers(0, v)), v) for v in range(1, n)]


def write_molecule_corpus(root, name="SYNTH-NCI1", count=350, seed=7):
    """NCI1-shaped corpus: 37-dim one-hot node categories, two classes.

    Label 1 when the mean degree reaches 2 (trees stay below, trees plus
    chords go above), so the task is structural, GIN-learnable, and movable
    by edge edits on injected nodes.
    """
    rng = np.random.default_rng(seed)
    cat_probs = np.array([0.35, 0.2, 0.12] + [0.33 / 34] * 34)
    cat_probs /= cat_probs.sum()
    edge_lines, indicator, labels, node_labels = [], [], [], []
    offset = 0
    for gid in range(1, count + 1):
        n = int(rng.integers(10, 26))
        dense = gid % 2 == 0
        pairs = set(random_tree(rng, n))
        if dense:
            want = n + 1 + int(rng.integers(0, n // 2))
            while len(pairs) < min(want, n * (n - 1) // 2):
                u, v = sorted(rng.choice(n, size=2, replace=False))
                pairs.add((int(u), int(v)))
        else:
            drop = int(rng.integers(1, 3))
            pairs = set(list(pairs)[: max(1, len(pairs) - drop)])
        mean_degree = 2 * len(pairs) / n
        labels.append("1" if mean_degree >= 2.0 else "0")
        indicator.extend([str(gid)] * n)
        node_labels.extend(str(int(c)) for c in rng.choice(37, size=n, p=cat_probs))
        _emit(edge_lines, offset, sorted(pairs))
        offset += n
    # ensure both one-hot extremes appear so the width is exactly 37
    node_labels[0], node_labels[-1] = "0", "36"
    _write(root, name, edge_lines, indicator, labels, node_labels=node_labels)
    return root


def random_wire_graph(rng, n=None, d=1):
    n = n or int(rng.integers(2, 10))
    edges = [[u, v] for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35]
    return {
        "num_nodes": n,
        "edges": edges,
        "node_features": rng.normal(size=(n, d)).tolist(),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
