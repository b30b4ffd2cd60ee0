"""GIN victim trainer and hard-label oracle server."""

from .data import DataError, GraphData, GraphSample, load_tu
from .inference import InferenceError, WeightBundle, graph_from_request
from .model import GinClassifier
from .serve import OracleServer, handle_line, serve
from .train import TrainConfig, TrainingError, train

__version__ = "0.1.0"
