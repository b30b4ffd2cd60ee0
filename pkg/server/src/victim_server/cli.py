"""victim-server command line: train a GIN victim, serve hard labels."""

from __future__ import annotations

import argparse
import sys

from .serve import serve
from .train import TrainConfig, TrainingError, train


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="victim-server")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on a TU dataset and export weights")
    t.add_argument("--dataset", required=True, help="directory holding the TU-format files")
    t.add_argument("--name", required=True)
    t.add_argument("--out", default="weights.json")
    t.add_argument("--layers", type=int, default=3)
    t.add_argument("--hidden", type=int, default=32)
    t.add_argument("--epochs", type=int, default=50)
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--split", type=float, default=0.8)
    t.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("serve", help="answer the wire protocol from a weight file")
    s.add_argument("--weights", required=True)
    s.add_argument("--listen", default="127.0.0.1:9100", help="host:port, or '-' for stdio")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        cfg = TrainConfig(
            dataset_path=args.dataset,
            dataset_name=args.name,
            layers=args.layers,
            hidden=args.hidden,
            epochs=args.epochs,
            lr=args.lr,
            split=args.split,
            seed=args.seed,
            out_path=args.out,
        )
        try:
            accuracy, _ = train(cfg)
        except TrainingError as exc:
            print(f"training failed: {exc}", file=sys.stderr)
            return 1
        print(f"test accuracy {accuracy:.4f}, weights written to {args.out}")
        return 0
    serve(args.weights, args.listen)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
