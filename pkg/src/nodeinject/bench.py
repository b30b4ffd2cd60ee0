"""Experiment runner, metric aggregation, and report emission.

Attacks fan out over the dataset (optionally across a worker pool), and the
per-graph outcomes reduce into the table columns the attack is evaluated on:
SR, success / Pred Change / No need counts, Injected, Perturb Edge, Query
Count, and Attack Time.  Per-graph seeds derive from (global seed, graph
index) so worker scheduling cannot change results.
"""

from __future__ import annotations

import dataclasses
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import attack as atk
from .attack import AttackConfig, AttackOutcome, attack_graph
from .gin import GinVictim
from .graphs import Dataset, export_graph
from .injection import InjectionPlan, injection_count
from .remote import remote_victim
from .tu import parse_tu_dataset
from .victims import VictimOracle, rule_victim


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: str = ""
    dataset_name: str = ""
    victim: str = "builtin:edge_parity"
    weights_path: str = ""
    feature_init: str = "zero"
    connection_init: str = "mode"
    inject_percent: float = 0.0
    inject_number: int = 0
    iterative: bool = False
    budgets: tuple[float, ...] = (0.1,)
    lambda_tol: float = 1e-3
    num_directions: int = 50
    grad_samples: int = 20
    smoothing: float = 0.1
    step_size: float = 0.2
    max_iters: int = 50
    query_limit: int = 0
    seed: int = 0
    workers: int = 1
    limit: int = 0  # attack only the first `limit` graphs when > 0
    export_dir: str = ""

    def __post_init__(self):
        if not self.budgets:
            raise BenchError("at least one budget required")
        for b in self.budgets:
            if not (0.0 < b <= 1.0):
                raise BenchError(f"budget {b} outside (0, 1]")
        if self.workers < 1:
            raise BenchError("workers must be >= 1")


@dataclass
class OutcomeRecord:
    graph_index: int
    status: str
    flipped_edges: int
    rate: float
    queries_used: int
    wall_time: float
    injected_still_connected: bool
    k: int


@dataclass
class AggregateReport:
    method: str
    budget: float
    seed: int
    num_graphs: int
    success_count: int
    pred_change_count: int
    no_need_count: int
    failure_count: int
    sr: Optional[float]
    injected_pct: Optional[float]
    perturb_edge_avg: Optional[float]
    query_count_avg: Optional[float]
    attack_time_avg: Optional[float]
    config: dict = field(default_factory=dict)
    records: list[OutcomeRecord] = field(default_factory=list)


def success_rate(success: int, pred_change: int, no_need: int, num_graphs: int) -> Optional[float]:
    """SR percentage: (success + pred change) / (graphs - no need); None when
    every graph was already misclassified."""
    denom = num_graphs - no_need
    if denom <= 0:
        return None
    return 100.0 * (success + pred_change) / denom


def compute_metrics(
    records: Sequence[OutcomeRecord],
    method: str = "",
    budget: float = 0.0,
    seed: int = 0,
    config: Optional[dict] = None,
    injected_denominator: str = "success",
) -> AggregateReport:
    """Reduce per-graph outcomes into one table row.

    Perturb Edge averages over successes (failures carry no final
    perturbation); Injected uses successes as its denominator by default,
    or every attacked graph with ``injected_denominator='attacked'``.
    """
    if not records:
        raise BenchError("cannot aggregate an empty outcome list")
    if injected_denominator not in ("success", "attacked"):
        raise BenchError(f"unknown injected_denominator {injected_denominator!r}")
    counts = {atk.SUCCESS: 0, atk.PRED_CHANGE: 0, atk.NO_NEED: 0, atk.FAILURE: 0}
    for r in records:
        counts[r.status] += 1
    successes = [r for r in records if r.status == atk.SUCCESS]
    attacked = [r for r in records if r.status != atk.NO_NEED]

    perturb_edge_avg = (
        sum(r.flipped_edges for r in successes) / len(successes) if successes else None
    )
    connected_pool = successes if injected_denominator == "success" else attacked
    injected_pct = (
        100.0 * sum(1 for r in connected_pool if r.injected_still_connected) / len(connected_pool)
        if connected_pool
        else None
    )
    query_count_avg = sum(r.queries_used for r in attacked) / len(attacked) if attacked else None
    attack_time_avg = sum(r.wall_time for r in attacked) / len(attacked) if attacked else None

    return AggregateReport(
        method=method,
        budget=budget,
        seed=seed,
        num_graphs=len(records),
        success_count=counts[atk.SUCCESS],
        pred_change_count=counts[atk.PRED_CHANGE],
        no_need_count=counts[atk.NO_NEED],
        failure_count=counts[atk.FAILURE],
        sr=success_rate(counts[atk.SUCCESS], counts[atk.PRED_CHANGE], counts[atk.NO_NEED], len(records)),
        injected_pct=injected_pct,
        perturb_edge_avg=perturb_edge_avg,
        query_count_avg=query_count_avg,
        attack_time_avg=attack_time_avg,
        config=dict(config or {}),
        records=list(records),
    )


def make_oracle_factory(cfg: ExperimentConfig) -> Callable[[], VictimOracle]:
    """One oracle handle per worker; remote victims get their own connection."""
    selector = cfg.victim
    if selector.startswith("builtin:"):
        parts = selector.split(":")
        kind = parts[1]
        if kind == "gin":
            if not cfg.weights_path:
                raise BenchError("builtin:gin requires a weights file")
            victim = GinVictim.from_file(cfg.weights_path)
            return lambda: victim
        threshold = int(parts[2]) if len(parts) > 2 else 2
        victim = rule_victim(kind, threshold)
        return lambda: victim
    if selector.startswith("remote:"):
        endpoint = selector[len("remote:") :]
        return lambda: remote_victim(endpoint)
    raise BenchError(f"unknown victim selector {selector!r}")


def _record(index: int, out: AttackOutcome) -> OutcomeRecord:
    return OutcomeRecord(
        graph_index=index,
        status=out.status,
        flipped_edges=out.flipped_edges,
        rate=out.rate,
        queries_used=out.queries_used,
        wall_time=out.wall_time,
        injected_still_connected=out.injected_still_connected,
        k=out.k,
    )


def graph_seeds(global_seed: int, graph_index: int) -> tuple[int, int]:
    """Worker-independent (injection seed, optimizer seed) for one graph."""
    state = np.random.SeedSequence([global_seed & 0xFFFFFFFF, graph_index]).generate_state(2)
    return int(state[0]), int(state[1])


def run_experiment(cfg: ExperimentConfig, dataset: Optional[Dataset] = None) -> list[AggregateReport]:
    """Attack every graph at every budget; one report per budget."""
    if dataset is None:
        if not cfg.dataset_path or not cfg.dataset_name:
            raise BenchError("dataset path and name required")
        dataset = parse_tu_dataset(cfg.dataset_path, cfg.dataset_name)
    graphs = dataset.graphs[: cfg.limit] if cfg.limit > 0 else dataset.graphs
    if not graphs:
        raise BenchError("no graphs to attack")
    factory = make_oracle_factory(cfg)
    local = threading.local()

    def worker_oracle() -> VictimOracle:
        if not hasattr(local, "oracle"):
            local.oracle = factory()
        return local.oracle

    reports = []
    for budget in cfg.budgets:
        attack_cfg = AttackConfig(
            edge_budget=budget,
            lambda_tol=cfg.lambda_tol,
            num_directions=cfg.num_directions,
            grad_samples=cfg.grad_samples,
            smoothing=cfg.smoothing,
            step_size=cfg.step_size,
            max_iters=cfg.max_iters,
            query_limit=cfg.query_limit,
        )

        def attack_one(index: int) -> OutcomeRecord:
            g = graphs[index]
            k = injection_count(g, cfg.inject_percent, cfg.inject_number)
            plan_seed, run_seed = graph_seeds(cfg.seed, index)
            plan = InjectionPlan(
                k=1 if cfg.iterative else k,
                feature_init=cfg.feature_init,
                connection_init=cfg.connection_init,
                seed=plan_seed,
            )
            out = attack_graph(
                g,
                plan,
                worker_oracle(),
                dataclasses.replace(attack_cfg, seed=run_seed),
                iterative=cfg.iterative,
                k_max=k,
                feature_kind=dataset.feature_kind,
            )
            if cfg.export_dir and out.status in (atk.SUCCESS, atk.PRED_CHANGE):
                _export_adversarial(cfg.export_dir, budget, index, out)
            return _record(index, out)

        if cfg.workers == 1:
            records = [attack_one(i) for i in range(len(graphs))]
        else:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                records = list(pool.map(attack_one, range(len(graphs))))

        reports.append(
            compute_metrics(
                records,
                method=cfg.connection_init,
                budget=budget,
                seed=cfg.seed,
                config=_config_echo(cfg, budget),
            )
        )
    return reports


def _config_echo(cfg: ExperimentConfig, budget: float) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["budgets"] = list(cfg.budgets)
    echo["active_budget"] = budget
    return echo


def _export_adversarial(export_dir: str, budget: float, index: int, out: AttackOutcome) -> None:
    path = Path(export_dir)
    path.mkdir(parents=True, exist_ok=True)
    marked = range(out.num_original, out.num_original + out.k)
    name = f"b{budget:g}_graph{index:05d}_{out.status}.dot"
    (path / name).write_text(export_graph(out.final_graph, marked, "dot"), encoding="utf-8")


CSV_HEADER = "method,budget,SR,success,pred_change,injected,no_need,perturb_edge,query_count,attack_time"


def _csv_cell(value: Optional[float], fmt: str) -> str:
    return "" if value is None else format(value, fmt)


def _csv_row(r: AggregateReport) -> str:
    return ",".join(
        [
            r.method,
            format(r.budget, "g"),
            _csv_cell(r.sr, ".2f"),
            str(r.success_count),
            str(r.pred_change_count),
            _csv_cell(r.injected_pct, ".2f"),
            str(r.no_need_count),
            _csv_cell(r.perturb_edge_avg, ".2f"),
            _csv_cell(r.query_count_avg, ".1f"),
            _csv_cell(r.attack_time_avg, ".2f"),
        ]
    )


def report_to_json_dict(r: AggregateReport) -> dict:
    d = dataclasses.asdict(r)
    d["records"] = [dataclasses.asdict(rec) for rec in r.records]
    return d


def report_from_json_dict(d: dict) -> AggregateReport:
    records = [OutcomeRecord(**rec) for rec in d.pop("records")]
    return AggregateReport(records=records, **d)


def emit_report(reports: AggregateReport | Sequence[AggregateReport], format: str = "table") -> str:
    """Render one or more per-budget reports as csv, json, or a text table."""
    if isinstance(reports, AggregateReport):
        reports = [reports]
    if format == "csv":
        return "\n".join([CSV_HEADER] + [_csv_row(r) for r in reports]) + "\n"
    if format == "json":
        return json.dumps([report_to_json_dict(r) for r in reports], indent=2) + "\n"
    if format == "table":
        cols = CSV_HEADER.split(",")
        rows = [cols] + [_csv_row(r).split(",") for r in reports]
        rows = [[cell if cell else "-" for cell in row] for row in rows]
        widths = [max(len(row[i]) for row in rows) for i in range(len(cols))]
        lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip() for row in rows]
        return "\n".join(lines) + "\n"
    raise BenchError(f"unknown report format {format!r}")
