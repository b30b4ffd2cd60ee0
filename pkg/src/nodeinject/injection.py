"""Node injection: feature initialization, initial connections, pivot node.

Injected nodes occupy indices N..N+k-1 of the augmented graph; original
edges are never touched.  All randomness flows from the plan seed, so equal
seeds give equal augmented graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graphs import Graph

FEATURE_INITS = (
    "zero",
    "one",
    "random",
    "node_mean",
    "gaussian_coordinate",
    "empirical_one_hot",
    "pivot_perturbed",
)
CONNECTION_INITS = ("no_connection", "random", "mode", "pivot_all")

# Spellings accepted on the CLI surface.
_FEATURE_ALIASES = {"random_uniform": "random"}

_PIVOT_REDRAW_LIMIT = 1000


class InjectionError(ValueError):
    """Raised for invalid plans or unsatisfiable feature constraints."""


@dataclass(frozen=True)
class InjectionPlan:
    k: int = 1
    feature_init: str = "zero"
    connection_init: str = "mode"
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InjectionError(f"k must be >= 1, got {self.k}")
        feat = _FEATURE_ALIASES.get(self.feature_init, self.feature_init)
        if feat != self.feature_init:
            object.__setattr__(self, "feature_init", feat)
        if self.feature_init not in FEATURE_INITS:
            raise InjectionError(f"unknown feature_init {self.feature_init!r}")
        if self.connection_init not in CONNECTION_INITS:
            raise InjectionError(f"unknown connection_init {self.connection_init!r}")

    def with_k(self, k: int) -> "InjectionPlan":
        return replace(self, k=k)


class AugmentedGraph:
    """A victim graph with k freshly injected nodes.

    ``base`` holds N + k nodes; its edge set is the post-initialization
    adjacency the attack perturbs against.
    """

    __slots__ = ("base", "num_original", "k")

    def __init__(self, base: Graph, num_original: int, k: int):
        self.base = base
        self.num_original = num_original
        self.k = k

    @property
    def injected_indices(self) -> range:
        return range(self.num_original, self.num_original + self.k)

    @property
    def initial_adjacency(self) -> frozenset:
        return self.base.edges


def _round_half_away(x: np.ndarray) -> np.ndarray:
    # np.round would round halves to even; coordinates round half away from zero.
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def init_features(
    g: Graph, plan: InjectionPlan, feature_kind: str = "integer_vector"
) -> np.ndarray:
    """The k injected feature rows implied by ``plan``."""
    rng = np.random.default_rng(plan.seed)
    return _init_features(g, plan, feature_kind, rng)


def _init_features(g: Graph, plan: InjectionPlan, feature_kind: str, rng) -> np.ndarray:
    k, d = plan.k, g.feature_dim
    feats = g.node_features
    mode = plan.feature_init

    if mode == "zero":
        return np.zeros((k, d))
    if mode == "one":
        return np.ones((k, d))
    if mode == "random":
        return rng.random((k, d))
    if mode == "node_mean":
        return np.tile(feats.mean(axis=0), (k, 1))

    if mode == "gaussian_coordinate":
        if feature_kind != "integer_vector":
            raise InjectionError("gaussian_coordinate requires integer_vector features")
        mean = feats.mean(axis=0)
        std = feats.std(axis=0)  # population std
        return _round_half_away(rng.normal(mean, std, size=(k, d)))

    if mode == "empirical_one_hot":
        if feature_kind != "one_hot":
            raise InjectionError("empirical_one_hot requires one_hot features")
        counts = feats.sum(axis=0)
        cats = rng.choice(d, size=k, p=counts / counts.sum())
        rows = np.zeros((k, d))
        rows[np.arange(k), cats] = 1.0
        return rows

    if mode == "pivot_perturbed":
        if feature_kind != "integer_vector":
            raise InjectionError("pivot_perturbed requires integer_vector features")
        taken = {tuple(row) for row in feats}
        rows = np.zeros((k, d))
        for i in range(k):
            for _ in range(_PIVOT_REDRAW_LIMIT):
                row = feats[rng.integers(g.num_nodes)].copy()
                row[rng.integers(d)] += rng.choice((-1.0, 1.0))
                if tuple(row) not in taken:
                    break
            else:
                raise InjectionError(
                    f"pivot_perturbed: no distinct row found in {_PIVOT_REDRAW_LIMIT} redraws"
                )
            taken.add(tuple(row))
            rows[i] = row
        return rows

    raise InjectionError(f"unknown feature_init {mode!r}")


def pivot_node(g: Graph) -> int:
    """The node of maximum degree; ties break toward the smallest index."""
    return int(np.argmax(g.degrees()))


def inject(g: Graph, plan: InjectionPlan, feature_kind: str = "integer_vector") -> AugmentedGraph:
    """Inject ``plan.k`` nodes into ``g`` with initialized features and edges."""
    rng = np.random.default_rng(plan.seed)
    new_rows = _init_features(g, plan, feature_kind, rng)
    n, k = g.num_nodes, plan.k

    edges = set(g.edges)
    if plan.connection_init == "random":
        for i in range(k):
            edges.add((int(rng.integers(n)), n + i))
    elif plan.connection_init in ("mode", "pivot_all"):
        pivot = pivot_node(g)
        for i in range(k):
            edges.add((pivot, n + i))
    # no_connection: injected nodes stay isolated

    base = Graph(
        n + k,
        frozenset(edges),
        np.vstack([g.node_features, new_rows]),
        g.label,
        validate=False,
    )
    return AugmentedGraph(base, num_original=n, k=k)


def injection_count(g: Graph, percent: float = 0.0, fixed: int = 0) -> int:
    """Node budget: ``fixed`` when given, else max(1, floor(percent * N))."""
    if (percent > 0) == (fixed > 0):
        raise InjectionError("exactly one of percent and fixed must be nonzero")
    if fixed > 0:
        return int(fixed)
    if not (0.0 < percent <= 1.0):
        raise InjectionError(f"percent must be in (0, 1], got {percent}")
    # tiny epsilon keeps 0.1 * 30 from flooring to 2
    return max(1, math.floor(percent * g.num_nodes + 1e-9))
