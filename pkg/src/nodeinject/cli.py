"""Command-line entry point for running attack experiments."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import ExperimentConfig, emit_report, run_experiment
from .injection import CONNECTION_INITS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="attack",
        description="Hard-label black-box node injection attacks on graph classifiers",
    )
    p.add_argument("--dataset", required=True, help="directory holding the TU-format files")
    p.add_argument("--name", required=True, help="dataset name, e.g. NCI1 or COIL-DEL")
    p.add_argument(
        "--victim",
        default="builtin:edge_parity",
        help="builtin:edge_parity | builtin:degree_threshold:<t> | builtin:feature_sum_sign "
        "| builtin:gin | remote:<host>:<port>",
    )
    p.add_argument("--weights", default="", help="GIN weight file for builtin:gin")
    p.add_argument(
        "--budget",
        type=float,
        action="append",
        help="edge perturbation budget b in (0,1]; repeat for several budgets",
    )
    p.add_argument("--inject-percent", type=float, default=0.0)
    p.add_argument("--inject-number", type=int, default=0)
    p.add_argument(
        "--feature-init",
        default="zero",
        choices=[
            "zero",
            "one",
            "random",
            "node_mean",
            "gaussian_coordinate",
            "empirical_one_hot",
            "pivot_perturbed",
        ],
    )
    p.add_argument("--connection-init", default="mode", choices=list(CONNECTION_INITS))
    p.add_argument("--iterative", action="store_true")
    p.add_argument("--query-limit", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--limit", type=int, default=0, help="attack only the first N graphs")
    p.add_argument("--out", default="", help="write the report here instead of stdout")
    p.add_argument("--format", default="table", choices=["json", "csv", "table"])
    p.add_argument(
        "--export-graphs", default="", help="write DOT files of adversarial graphs to this directory"
    )
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--grad-samples", type=int, default=20)
    p.add_argument("--num-directions", type=int, default=50)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig(
        dataset_path=args.dataset,
        dataset_name=args.name,
        victim=args.victim,
        weights_path=args.weights,
        feature_init=args.feature_init,
        connection_init=args.connection_init,
        inject_percent=args.inject_percent,
        inject_number=args.inject_number,
        iterative=args.iterative,
        budgets=tuple(args.budget) if args.budget else (0.1,),
        num_directions=args.num_directions,
        grad_samples=args.grad_samples,
        max_iters=args.max_iters,
        query_limit=args.query_limit,
        seed=args.seed,
        workers=args.workers,
        limit=args.limit,
        export_dir=args.export_graphs,
    )
    reports = run_experiment(cfg)
    text = emit_report(reports, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
