"""Torch GIN matching the exported weight-file architecture.

Per layer: z = (1 + eps) * h + A h, pushed through a two-sublayer perceptron
(linear, relu, linear).  The readout is a single linear map on the sum-pooled
final embeddings.  No activation sits between layers, so the exported weights
reproduce exactly under the portable inference rule.
"""

from __future__ import annotations

import torch
import torch.nn as nn


class GinClassifier(nn.Module):
    def __init__(self, input_dim: int, hidden: int, layers: int, num_classes: int):
        super().__init__()
        self.input_dim = input_dim
        self.num_classes = num_classes
        self.eps = nn.ParameterList(
            [nn.Parameter(torch.zeros(())) for _ in range(layers)]
        )
        self.mlps = nn.ModuleList()
        width = input_dim
        for _ in range(layers):
            self.mlps.append(
                nn.Sequential(nn.Linear(width, hidden), nn.ReLU(), nn.Linear(hidden, hidden))
            )
            width = hidden
        self.readout = nn.Linear(width, num_classes)

    def forward(self, adjacency: torch.Tensor, features: torch.Tensor) -> torch.Tensor:
        h = features
        for eps, mlp in zip(self.eps, self.mlps):
            h = mlp((1.0 + eps) * h + adjacency @ h)
        return self.readout(h.sum(dim=0))

    def export_weights(self, metadata: dict | None = None) -> dict:
        """Weight document in the portable JSON schema."""
        layers = []
        for eps, mlp in zip(self.eps, self.mlps):
            subs = [mod for mod in mlp if isinstance(mod, nn.Linear)]
            layers.append(
                {
                    "eps": float(eps.item()),
                    "mlp": [
                        {
                            "weight": sub.weight.detach().cpu().numpy().tolist(),
                            "bias": sub.bias.detach().cpu().numpy().tolist(),
                        }
                        for sub in subs
                    ],
                }
            )
        return {
            "input_dim": self.input_dim,
            "num_classes": self.num_classes,
            "layers": layers,
            "readout": {
                "weight": self.readout.weight.detach().cpu().numpy().tolist(),
                "bias": self.readout.bias.detach().cpu().numpy().tolist(),
            },
            "metadata": dict(metadata or {}),
        }
