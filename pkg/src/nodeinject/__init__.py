"""Hard-label black-box node injection attacks on graph classifiers."""

from .attack import (
    FAILURE,
    NO_NEED,
    PRED_CHANGE,
    SUCCESS,
    AttackConfig,
    AttackOutcome,
    PerturbationState,
    apply_perturbation,
    attack_graph,
    eval_g,
    initial_direction_search,
    objective_p,
    optimize,
    perturbation_rate,
)
from .bench import (
    AggregateReport,
    ExperimentConfig,
    OutcomeRecord,
    compute_metrics,
    emit_report,
    run_experiment,
    success_rate,
)
from .gin import GinVictim, GinWeights, gin_predict, load_weights, save_weights
from .graphs import Dataset, Graph, GraphError, degree, export_graph, graph_from_json
from .injection import (
    AugmentedGraph,
    InjectionPlan,
    init_features,
    inject,
    injection_count,
    pivot_node,
)
from .remote import RemoteVictim, RemoteVictimError, remote_victim
from .tu import TUFormatError, parse_tu_dataset
from .victims import CachingOracle, QueryBudgetExceeded, QueryCounter, VictimOracle, rule_victim

__version__ = "0.1.0"
