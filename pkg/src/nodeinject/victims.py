"""Hard-label victim oracles and exact query accounting.

Every victim exposes only ``predict(graph) -> label`` and ``num_classes()``.
No scores, logits, or gradients leave the oracle; that is the whole threat
model.  :class:`QueryCounter` wraps any oracle and counts each predict call,
optionally enforcing a hard query budget.
"""

from __future__ import annotations

import hashlib
import threading
from typing import Protocol, runtime_checkable

from .graphs import Graph


@runtime_checkable
class VictimOracle(Protocol):
    def predict(self, g: Graph) -> int: ...

    def num_classes(self) -> int: ...


class QueryBudgetExceeded(RuntimeError):
    """Raised when a predict call would exceed the configured query limit."""


class QueryCounter:
    """Counts predict calls routed through it; optional hard limit (0 = none).

    Thread safe: increments are atomic with respect to concurrent callers.
    """

    def __init__(self, oracle: VictimOracle, limit: int = 0):
        self._oracle = oracle
        self.limit = int(limit)
        self.total_queries = 0
        self._lock = threading.Lock()

    def predict(self, g: Graph) -> int:
        with self._lock:
            if self.limit > 0 and self.total_queries >= self.limit:
                raise QueryBudgetExceeded(f"query limit {self.limit} reached")
            self.total_queries += 1
        return self._oracle.predict(g)

    def num_classes(self) -> int:
        return self._oracle.num_classes()


def _graph_key(g: Graph) -> bytes:
    h = hashlib.sha256()
    h.update(g.num_nodes.to_bytes(8, "little"))
    for u, v in sorted(g.edges):
        h.update(u.to_bytes(8, "little"))
        h.update(v.to_bytes(8, "little"))
    h.update(g.node_features.tobytes())
    return h.digest()


class CachingOracle:
    """Optional memo layer keyed by a canonical graph hash.

    Cache hits never reach the wrapped oracle, so they are excluded from any
    downstream QueryCounter; they are tallied separately in ``cache_hits``.
    Off by default in the pipeline.
    """

    def __init__(self, oracle: VictimOracle):
        self._oracle = oracle
        self._cache: dict[bytes, int] = {}
        self.cache_hits = 0
        self._lock = threading.Lock()

    def predict(self, g: Graph) -> int:
        key = _graph_key(g)
        with self._lock:
            if key in self._cache:
                self.cache_hits += 1
                return self._cache[key]
        label = self._oracle.predict(g)
        with self._lock:
            self._cache[key] = label
        return label

    def num_classes(self) -> int:
        return self._oracle.num_classes()


class EdgeParityVictim:
    """Labels a graph by the parity of its edge count."""

    def predict(self, g: Graph) -> int:
        return len(g.edges) % 2

    def num_classes(self) -> int:
        return 2


class DegreeThresholdVictim:
    """Labels 1 iff the maximum node degree reaches ``threshold``."""

    def __init__(self, threshold: int):
        self.threshold = int(threshold)

    def predict(self, g: Graph) -> int:
        counts = [0] * g.num_nodes
        t = self.threshold
        for u, v in g.edges:
            counts[u] += 1
            if counts[u] >= t:
                return 1
            counts[v] += 1
            if counts[v] >= t:
                return 1
        return 1 if t <= 0 else 0

    def num_classes(self) -> int:
        return 2


class FeatureSumSignVictim:
    """Labels 1 iff the total feature sum is positive."""

    def predict(self, g: Graph) -> int:
        return 1 if float(g.node_features.sum()) > 0.0 else 0

    def num_classes(self) -> int:
        return 2


def rule_victim(kind: str, threshold: int = 2) -> VictimOracle:
    """Deterministic toy victims used for brute-force oracle tests."""
    if kind == "edge_parity":
        return EdgeParityVictim()
    if kind == "degree_threshold":
        return DegreeThresholdVictim(threshold)
    if kind == "feature_sum_sign":
        return FeatureSumSignVictim()
    raise ValueError(f"unknown rule victim {kind!r}")
