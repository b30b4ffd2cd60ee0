"""Hard-label boundary search over injected-node edges.

The perturbation space is the k x N matrix of injected-to-original edge
slots.  A relaxed matrix theta in [0,1]^{k x N} induces an edge edit by
thresholding at 0.5; the distance to the decision boundary along a direction
is found by binary search on the scale lambda, and a clipped-L1 surrogate of
the implied flip count is minimized with a sign-based zeroth-order gradient
estimate.  The budget constraint (flip rate <= b) is enforced by feasibility
filtering of every boundary-crossing candidate seen, never by steering the
search, so runs that differ only in budget share one trajectory.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .graphs import Graph
from .injection import AugmentedGraph, InjectionPlan, inject
from .victims import QueryBudgetExceeded, QueryCounter, VictimOracle

NO_NEED = "no_need"
PRED_CHANGE = "pred_change"
SUCCESS = "success"
FAILURE = "failure"


class AttackError(ValueError):
    pass


@dataclass(frozen=True)
class AttackConfig:
    edge_budget: float = 0.1
    lambda_max: Optional[float] = None  # None: sqrt(k * N) per instance
    lambda_tol: float = 1e-3
    num_directions: int = 50
    grad_samples: int = 20
    smoothing: float = 0.1
    step_size: float = 0.2
    max_iters: int = 50
    query_limit: int = 0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.edge_budget <= 1.0):
            raise AttackError(f"edge_budget must be in (0, 1], got {self.edge_budget}")
        if self.lambda_max is not None and self.lambda_max <= 0:
            raise AttackError("lambda_max must be positive")
        for name in ("lambda_tol", "smoothing", "step_size"):
            if getattr(self, name) <= 0:
                raise AttackError(f"{name} must be positive")
        for name in ("num_directions", "grad_samples", "max_iters"):
            if getattr(self, name) < 1:
                raise AttackError(f"{name} must be >= 1")
        if self.query_limit < 0:
            raise AttackError("query_limit must be >= 0 (0 = unlimited)")


@dataclass
class PerturbationState:
    theta: np.ndarray  # k x N, entries in [0, 1]
    theta_norm: np.ndarray  # theta scaled to unit Euclidean norm
    g_value: Optional[float]  # boundary distance, None while unresolved


@dataclass
class AttackOutcome:
    status: str
    final_graph: Graph
    flipped_edges: int
    rate: float
    queries_used: int
    wall_time: float
    injected_still_connected: bool
    k: int = 0
    num_original: int = 0


def normalize(theta: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(theta))
    if norm == 0.0:
        raise AttackError("cannot normalize an all-zero perturbation")
    return theta / norm


def clipped_l1(ghat: np.ndarray) -> float:
    """Sum of entries of ``ghat`` clipped beyond the 0.5 flip threshold."""
    return float(np.clip(ghat - 0.5, 0.0, 1.0).sum())


def default_lambda_max(k: int, n: int) -> float:
    return math.sqrt(k * n)


def apply_perturbation(aug: AugmentedGraph, theta: np.ndarray) -> Graph:
    """Flip the (N+i, j) edge status exactly where ``theta[i, j] >= 0.5``."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (aug.k, aug.num_original):
        raise AttackError(
            f"theta must be {aug.k} x {aug.num_original}, got {theta.shape}"
        )
    if not np.all(np.isfinite(theta)) or np.any(theta < 0):
        raise AttackError("theta entries must be finite and >= 0")
    return _apply_mask(aug, theta >= 0.5)


def _apply_mask(aug: AugmentedGraph, flip_mask: np.ndarray) -> Graph:
    n = aug.num_original
    base = aug.base
    edges = set(base.edges)
    for i, j in np.argwhere(flip_mask):
        e = (int(j), n + int(i))
        if e in edges:
            edges.remove(e)
        else:
            edges.add(e)
    return Graph(base.num_nodes, frozenset(edges), base.node_features, None, validate=False)


def perturbation_rate(aug: AugmentedGraph, g_final: Graph) -> float:
    """Fraction of the kN edge slots whose status differs from the start."""
    n = aug.num_original
    flips = 0
    for i in range(aug.k):
        for j in range(n):
            if ((j, n + i) in g_final.edges) != ((j, n + i) in aug.base.edges):
                flips += 1
    return flips / (aug.k * n)


class _Candidate:
    __slots__ = ("flips", "graph", "rate")

    def __init__(self, flips: int, graph: Graph, rate: float):
        self.flips = flips
        self.graph = graph
        self.rate = rate


class _BoundarySearch:
    """Owns one attack instance: oracle routing, candidate tracking, search."""

    def __init__(self, aug: AugmentedGraph, oracle, y0: int, cfg: AttackConfig):
        self.aug = aug
        self.k = aug.k
        self.n = aug.num_original
        self.y0 = y0
        self.cfg = cfg
        self.oracle = oracle
        self.lambda_max = (
            cfg.lambda_max if cfg.lambda_max is not None else default_lambda_max(self.k, self.n)
        )
        self.best: Optional[_Candidate] = None

    def _graph_at(self, scaled: np.ndarray) -> tuple[Graph, int]:
        flip_mask = scaled >= 0.5
        return _apply_mask(self.aug, flip_mask), int(flip_mask.sum())

    def _offer(self, flips: int, graph: Graph) -> None:
        rate = flips / (self.k * self.n)
        if rate <= self.cfg.edge_budget and (self.best is None or flips < self.best.flips):
            self.best = _Candidate(flips, graph, rate)

    def eval_g(self, theta_norm: np.ndarray) -> Optional[float]:
        """Boundary distance along ``theta_norm``; None when the ceiling
        probe does not flip the label.

        Binary search keeps label(hi) != y0 and label(lo) == y0 and returns
        the high endpoint once the interval is narrower than lambda_tol, so
        the returned scale always realizes a label flip.  Every resolved call
        offers its thresholded graph to the best-feasible tracker.
        """
        hi = self.lambda_max
        g_hi, flips_hi = self._graph_at(hi * theta_norm)
        if self.oracle.predict(g_hi) == self.y0:
            return None
        lo = 0.0
        while hi - lo > self.cfg.lambda_tol:
            mid = 0.5 * (lo + hi)
            g_mid, flips_mid = self._graph_at(mid * theta_norm)
            if self.oracle.predict(g_mid) != self.y0:
                hi, g_hi, flips_hi = mid, g_mid, flips_mid
            else:
                lo = mid
        self._offer(flips_hi, g_hi)
        return hi

    def objective(self, theta: np.ndarray) -> tuple[float, Optional[float]]:
        """Clipped-L1 surrogate p(theta); +inf for unresolved directions."""
        norm = float(np.linalg.norm(theta))
        if norm == 0.0:
            return math.inf, None
        theta_norm = theta / norm
        lam = self.eval_g(theta_norm)
        if lam is None:
            return math.inf, None
        return clipped_l1(lam * theta_norm), lam

    def initial_search(self, rng) -> Optional[PerturbationState]:
        best_lam, best_theta = None, None
        for _ in range(self.cfg.num_directions):
            theta = rng.integers(0, 2, size=(self.k, self.n)).astype(np.float64)
            while not theta.any():
                theta = rng.integers(0, 2, size=(self.k, self.n)).astype(np.float64)
            lam = self.eval_g(normalize(theta))
            if lam is not None and (best_lam is None or lam < best_lam):
                best_lam, best_theta = lam, theta
        if best_theta is None:
            return None
        return PerturbationState(best_theta, normalize(best_theta), best_lam)

    def descend(self, state: PerturbationState, rng) -> None:
        """Sign-estimate gradient steps on p; candidates accrue in the tracker."""
        cfg = self.cfg
        theta = state.theta.copy()
        p_cur = (
            math.inf
            if state.g_value is None
            else clipped_l1(state.g_value * state.theta_norm)
        )
        for _ in range(cfg.max_iters):
            grad = np.zeros_like(theta)
            for _ in range(cfg.grad_samples):
                u = rng.standard_normal(theta.shape)
                u /= np.linalg.norm(u)
                probe = np.clip(theta + cfg.smoothing * u, 0.0, 1.0)
                p_probe, _ = self.objective(probe)
                grad += _sign_diff(p_probe, p_cur) * u
            grad /= cfg.grad_samples
            theta = np.clip(theta - cfg.step_size * grad, 0.0, 1.0)
            p_cur, _ = self.objective(theta)

    def outcome_from_tracker(self, queries: int, wall: float) -> AttackOutcome:
        if self.best is None:
            return self._outcome(FAILURE, self.aug.base, 0, queries, wall)
        return self._outcome(SUCCESS, self.best.graph, self.best.flips, queries, wall)

    def _outcome(self, status: str, graph: Graph, flips: int, queries: int, wall: float) -> AttackOutcome:
        return AttackOutcome(
            status=status,
            final_graph=graph,
            flipped_edges=flips,
            rate=flips / (self.k * self.n),
            queries_used=queries,
            wall_time=wall,
            injected_still_connected=_injected_connected(graph, self.n, self.k),
            k=self.k,
            num_original=self.n,
        )


def _sign_diff(p_new: float, p_old: float) -> float:
    if math.isinf(p_new) and math.isinf(p_old):
        return 0.0
    if math.isinf(p_new):
        return 1.0
    if math.isinf(p_old):
        return -1.0
    return float(np.sign(p_new - p_old))


def _injected_connected(graph: Graph, n: int, k: int) -> bool:
    touched = set()
    for u, v in graph.edges:
        if u >= n:
            touched.add(u)
        if v >= n:
            touched.add(v)
    return all(n + i in touched for i in range(k))


def eval_g(
    aug: AugmentedGraph, theta_norm: np.ndarray, oracle: VictimOracle, y0: int, cfg: AttackConfig
) -> Optional[float]:
    """Minimum boundary-crossing scale along a unit direction, or None."""
    if not math.isclose(float(np.linalg.norm(theta_norm)), 1.0, rel_tol=1e-6):
        raise AttackError("theta_norm must have unit Euclidean norm")
    search = _BoundarySearch(aug, QueryCounter(oracle, cfg.query_limit), y0, cfg)
    return search.eval_g(np.asarray(theta_norm, dtype=np.float64))


def objective_p(
    aug: AugmentedGraph, theta: np.ndarray, oracle: VictimOracle, y0: int, cfg: AttackConfig
) -> float:
    """Clipped-L1 boundary objective; +inf when the direction never flips."""
    search = _BoundarySearch(aug, QueryCounter(oracle, cfg.query_limit), y0, cfg)
    p, _ = search.objective(np.asarray(theta, dtype=np.float64))
    return p


def initial_direction_search(
    aug: AugmentedGraph, oracle: VictimOracle, y0: int, cfg: AttackConfig
) -> Optional[PerturbationState]:
    """Best of ``num_directions`` random 0/1 directions, or None if none flips."""
    search = _BoundarySearch(aug, QueryCounter(oracle, cfg.query_limit), y0, cfg)
    return search.initial_search(np.random.default_rng(cfg.seed))


def optimize(
    aug: AugmentedGraph,
    oracle: VictimOracle,
    y0: int,
    cfg: AttackConfig,
    state: Optional[PerturbationState] = None,
) -> AttackOutcome:
    """Full boundary-distance minimization on one augmented graph."""
    start = time.perf_counter()
    counter = QueryCounter(oracle, cfg.query_limit)
    search = _BoundarySearch(aug, counter, y0, cfg)
    rng = np.random.default_rng(cfg.seed)
    try:
        if state is None:
            state = search.initial_search(rng)
        elif state.g_value is not None:
            # candidate implied by a caller-supplied state costs no query
            graph, flips = search._graph_at(state.g_value * state.theta_norm)
            search._offer(flips, graph)
        if state is not None:
            search.descend(state, rng)
    except QueryBudgetExceeded:
        pass
    return search.outcome_from_tracker(counter.total_queries, time.perf_counter() - start)


def _derive_seed(seed: int, salt: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFF, salt]).generate_state(1)[0])


def attack_graph(
    g: Graph,
    plan: InjectionPlan,
    oracle: VictimOracle,
    cfg: AttackConfig,
    iterative: bool = False,
    k_max: Optional[int] = None,
    feature_kind: str = "integer_vector",
) -> AttackOutcome:
    """Attack one labeled graph end to end.

    Checks for an already-wrong prediction (no_need), injects nodes, checks
    for an immediate flip (pred_change), then runs the direction search and
    descent.  Iterative mode retries with k = 1..k_max injected nodes and
    returns the first non-failure.
    """
    if g.label is None:
        raise AttackError("victim graph needs a ground-truth label")
    start = time.perf_counter()
    y0 = g.label
    counter = QueryCounter(oracle, cfg.query_limit)

    if counter.predict(g) != y0:
        return AttackOutcome(
            status=NO_NEED,
            final_graph=g,
            flipped_edges=0,
            rate=0.0,
            queries_used=counter.total_queries,
            wall_time=time.perf_counter() - start,
            injected_still_connected=True,
        )

    if iterative:
        ks = list(range(1, (k_max if k_max is not None else plan.k) + 1))
    else:
        ks = [plan.k]

    last: Optional[AttackOutcome] = None
    for k in ks:
        if iterative:
            plan_k = replace(plan, k=k, seed=_derive_seed(plan.seed, k))
            run_seed = _derive_seed(cfg.seed, k)
        else:
            plan_k, run_seed = replace(plan, k=k), cfg.seed
        aug = inject(g, plan_k, feature_kind)
        search = _BoundarySearch(aug, counter, y0, cfg)
        exhausted = False
        try:
            if counter.predict(aug.base) != y0:
                return search._outcome(
                    PRED_CHANGE, aug.base, 0, counter.total_queries, time.perf_counter() - start
                )
            rng = np.random.default_rng(run_seed)
            state = search.initial_search(rng)
            if state is not None:
                search.descend(state, rng)
        except QueryBudgetExceeded:
            exhausted = True
        last = search.outcome_from_tracker(counter.total_queries, time.perf_counter() - start)
        if last.status != FAILURE:
            return last
        if exhausted:
            break
    assert last is not None
    return last
