"""Independent reference oracles for the test suite.

Everything here is deliberately written against the raw definitions, not the
library code paths it checks: flips are applied with plain set arithmetic,
the boundary scale is found by exact enumeration of the critical scales, the
minimum flip count by exhaustive search, and the GIN forward pass by dense
adjacency-matrix algebra.
"""

from __future__ import annotations

import itertools

import numpy as np

from nodeinject.graphs import Graph


def flip_edges(base: Graph, num_original: int, pairs) -> Graph:
    """Toggle the (original j, injected n+i) pairs by brute set arithmetic."""
    edges = set(base.edges)
    for i, j in pairs:
        e = (j, num_original + i)
        if e in edges:
            edges.remove(e)
        else:
            edges.add(e)
    return Graph(base.num_nodes, edges, base.node_features, None, validate=False)


def scan_boundary(base, num_original, theta_norm, predict, y0, lambda_max):
    """Exact first boundary-crossing scale along theta_norm, or None.

    The flip set {ij : lambda * theta_norm_ij >= 0.5} only changes at the
    per-slot critical scales 0.5 / theta_norm_ij, so evaluating the label at
    each critical scale (sorted ascending) finds the exact first crossing for
    victims whose label flips once along the ray.  Slot membership is decided
    by comparing critical scales directly, which avoids the float round trip
    (0.5 / x) * x < 0.5.
    """
    k, n = theta_norm.shape
    crit_of = {
        (i, j): 0.5 / theta_norm[i, j]
        for i in range(k)
        for j in range(n)
        if theta_norm[i, j] > 0
    }
    for lam in sorted(set(crit_of.values())):
        if lam > lambda_max:
            break
        pairs = [slot for slot, c in crit_of.items() if c <= lam]
        if predict(flip_edges(base, num_original, pairs)) != y0:
            return lam
    return None


def brute_force_min_flips(base, num_original, k, predict, y0):
    """Exhaustive minimum flip count over all 2^(kN) slot subsets, or None."""
    n = num_original
    slots = [(i, j) for i in range(k) for j in range(n)]
    best = None
    for r in range(len(slots) + 1):
        if best is not None:
            break
        for combo in itertools.combinations(slots, r):
            if predict(flip_edges(base, n, combo)) != y0:
                best = r
                break
    return best


def dense_gin_scores(weights_dict: dict, adjacency: np.ndarray, features: np.ndarray) -> np.ndarray:
    """Dense-matrix GIN forward pass straight from the JSON weight layout."""
    h = np.asarray(features, dtype=np.float64)
    a = np.asarray(adjacency, dtype=np.float64)
    for layer in weights_dict["layers"]:
        z = (1.0 + layer["eps"]) * h + a @ h
        for si, sub in enumerate(layer["mlp"]):
            if si > 0:
                z = np.maximum(z, 0.0)
            z = z @ np.asarray(sub["weight"]).T + np.asarray(sub["bias"])
        h = z
    pooled = h.sum(axis=0)
    ro = weights_dict["readout"]
    return pooled @ np.asarray(ro["weight"]).T + np.asarray(ro["bias"])


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.num_nodes, g.num_nodes))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a
