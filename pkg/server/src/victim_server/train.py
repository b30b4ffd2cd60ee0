"""Training loop: fit the GIN on a TU dataset and export portable weights."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .data import GraphData, load_tu
from .model import GinClassifier


class TrainingError(RuntimeError):
    """Raised when the loss diverges."""


@dataclass
class TrainConfig:
    dataset_path: str = ""
    dataset_name: str = ""
    layers: int = 3
    hidden: int = 32
    epochs: int = 50
    lr: float = 0.01
    split: float = 0.8  # train fraction
    batch_size: int = 32
    seed: int = 0
    out_path: str = "weights.json"

    def __post_init__(self):
        if not (0.0 < self.split < 1.0):
            raise ValueError(f"split must be in (0, 1), got {self.split}")
        for name in ("layers", "hidden", "batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.epochs < 0 or self.lr <= 0:
            raise ValueError("epochs must be >= 0 and lr positive")


def split_indices(num: int, split: float, seed: int) -> tuple[list[int], list[int]]:
    order = list(np.random.default_rng(seed).permutation(num))
    cut = max(1, min(num - 1, int(round(split * num))))
    return [int(i) for i in order[:cut]], [int(i) for i in order[cut:]]


def _accuracy(model: GinClassifier, data: GraphData, indices) -> float:
    if not indices:
        return 0.0
    hits = 0
    with torch.no_grad():
        for i in indices:
            s = data.samples[i]
            scores = model(torch.tensor(s.adjacency, dtype=torch.float32),
                           torch.tensor(s.features, dtype=torch.float32))
            hits += int(torch.argmax(scores).item()) == s.label
    return hits / len(indices)


def train(cfg: TrainConfig, data: GraphData | None = None) -> tuple[float, dict]:
    """Fit on the train split; returns (test accuracy, weight document).

    The weight document is also written to ``cfg.out_path`` with the full
    training recipe and the held-out indices in its metadata block.
    """
    if data is None:
        data = load_tu(cfg.dataset_path, cfg.dataset_name)
    torch.manual_seed(cfg.seed)
    model = GinClassifier(data.input_dim, cfg.hidden, cfg.layers, data.num_classes)
    train_idx, test_idx = split_indices(len(data.samples), cfg.split, cfg.seed)

    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    loss_fn = torch.nn.CrossEntropyLoss()
    order_rng = np.random.default_rng(cfg.seed + 1)
    for _ in range(cfg.epochs):
        order = order_rng.permutation(train_idx)
        for pos in range(0, len(order), cfg.batch_size):
            batch = order[pos : pos + cfg.batch_size]
            opt.zero_grad()
            loss = torch.zeros(())
            for i in batch:
                s = data.samples[int(i)]
                scores = model(torch.tensor(s.adjacency, dtype=torch.float32),
                               torch.tensor(s.features, dtype=torch.float32))
                loss = loss + loss_fn(scores.unsqueeze(0), torch.tensor([s.label]))
            loss = loss / len(batch)
            if not torch.isfinite(loss):
                raise TrainingError("loss diverged")
            loss.backward()
            opt.step()

    accuracy = _accuracy(model, data, test_idx)
    doc = model.export_weights(
        metadata={
            "recipe": {k: v for k, v in asdict(cfg).items() if k != "out_path"},
            "optimizer": "adam",
            "test_accuracy": accuracy,
            "train_indices": train_idx,
            "test_indices": test_idx,
        }
    )
    Path(cfg.out_path).write_text(json.dumps(doc), encoding="utf-8")
    return accuracy, doc
