import threading

import numpy as np
import pytest

from nodeinject.gin import (
    GinVictim,
    WeightFormatError,
    gin_predict,
    load_weights,
    save_weights,
    weights_from_json_dict,
    weights_to_json_dict,
)
from nodeinject.graphs import Graph
from nodeinject.victims import (
    CachingOracle,
    QueryBudgetExceeded,
    QueryCounter,
    rule_victim,
)

from conftest import path_graph, star_graph, triangle_graph
from oracles import adjacency_matrix, dense_gin_scores


class TestRuleVictims:
    def test_edge_parity_triangle(self):
        assert rule_victim("edge_parity").predict(triangle_graph()) == 1

    def test_edge_parity_even(self):
        assert rule_victim("edge_parity").predict(path_graph(3)) == 0

    def test_degree_threshold_path(self):
        assert rule_victim("degree_threshold", 2).predict(path_graph(3)) == 1

    def test_degree_threshold_below(self):
        assert rule_victim("degree_threshold", 3).predict(path_graph(3)) == 0

    def test_feature_sum_sign_zero(self):
        g = Graph(2, [(0, 1)], np.zeros((2, 2)))
        assert rule_victim("feature_sum_sign").predict(g) == 0

    def test_feature_sum_sign_positive(self):
        assert rule_victim("feature_sum_sign").predict(path_graph(2)) == 1

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            rule_victim("coin_flip")

    def test_determinism_ten_repeats(self):
        victim = rule_victim("degree_threshold", 3)
        g = star_graph(4)
        labels = {victim.predict(g) for _ in range(10)}
        assert labels == {1}


class TestQueryCounter:
    def test_counts_every_call(self):
        counter = QueryCounter(rule_victim("edge_parity"))
        for _ in range(7):
            counter.predict(path_graph(2))
        assert counter.total_queries == 7

    def test_limit_enforced(self):
        counter = QueryCounter(rule_victim("edge_parity"), limit=3)
        for _ in range(3):
            counter.predict(path_graph(2))
        with pytest.raises(QueryBudgetExceeded):
            counter.predict(path_graph(2))
        assert counter.total_queries == 3

    def test_zero_limit_means_unlimited(self):
        counter = QueryCounter(rule_victim("edge_parity"), limit=0)
        for _ in range(100):
            counter.predict(path_graph(2))
        assert counter.total_queries == 100

    def test_concurrent_increments_are_exact(self):
        counter = QueryCounter(rule_victim("edge_parity"))
        g = path_graph(2)

        def hammer():
            for _ in range(200):
                counter.predict(g)

        threads = [threading.Thread(target=hammer) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert counter.total_queries == 1600


class TestCachingOracle:
    def test_hits_bypass_wrapped_oracle(self):
        counter = QueryCounter(rule_victim("edge_parity"))
        cached = CachingOracle(counter)
        g = path_graph(3)
        assert cached.predict(g) == cached.predict(g) == cached.predict(g)
        assert counter.total_queries == 1
        assert cached.cache_hits == 2

    def test_distinct_graphs_not_conflated(self):
        cached = CachingOracle(rule_victim("edge_parity"))
        assert cached.predict(path_graph(3)) == 0
        assert cached.predict(triangle_graph()) == 1
        assert cached.cache_hits == 0


def constant_weights_dict(d=2, classes=3):
    # all-zero network: class 0 readout bias wins every argmax
    zeros = lambda r, c: [[0.0] * c for _ in range(r)]
    return {
        "input_dim": d,
        "num_classes": classes,
        "layers": [
            {"eps": 0.0, "mlp": [
                {"weight": zeros(4, d), "bias": [0.0] * 4},
                {"weight": zeros(4, 4), "bias": [0.0] * 4},
            ]}
        ],
        "readout": {"weight": zeros(classes, 4), "bias": [1.0] + [0.0] * (classes - 1)},
    }


class TestGinPredict:
    def test_constant_network_always_class_zero(self, rng):
        w = weights_from_json_dict(constant_weights_dict())
        for _ in range(10):
            n = int(rng.integers(1, 8))
            edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5}
            g = Graph(n, edges, np.asarray(rng.random((n, 2))))
            assert gin_predict(w, g) == 0

    def test_two_node_hand_case_matches_dense_oracle(self):
        # single layer, identity-flavored weights on a 2-node path
        doc = {
            "input_dim": 2,
            "num_classes": 2,
            "layers": [
                {"eps": 0.5, "mlp": [
                    {"weight": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]},
                    {"weight": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.1, -0.1]},
                ]}
            ],
            "readout": {"weight": [[1.0, 0.0], [0.0, 1.0]], "bias": [0.0, 0.0]},
        }
        g = Graph(2, [(0, 1)], np.array([[1.0, 0.0], [0.0, 1.0]]))
        # by hand: z_v = 1.5*h_v + h_other -> [[1.5,1],[1,1.5]]; relu no-op;
        # +bias -> [[1.6,0.9],[1.1,1.4]]; pooled = [2.7,2.3] -> class 0
        assert gin_predict(weights_from_json_dict(doc), g) == 0
        scores = dense_gin_scores(doc, adjacency_matrix(g), g.node_features)
        assert np.allclose(scores, [2.7, 2.3])

    def test_agrees_with_dense_oracle_on_random_instances(self, rng):
        for _ in range(50):
            d, h, classes = 3, 5, int(rng.integers(2, 5))
            doc = {
                "input_dim": d,
                "num_classes": classes,
                "layers": [
                    {
                        "eps": float(rng.normal()),
                        "mlp": [
                            {"weight": rng.normal(size=(h, d)).tolist(), "bias": rng.normal(size=h).tolist()},
                            {"weight": rng.normal(size=(h, h)).tolist(), "bias": rng.normal(size=h).tolist()},
                        ],
                    },
                    {
                        "eps": float(rng.normal()),
                        "mlp": [
                            {"weight": rng.normal(size=(h, h)).tolist(), "bias": rng.normal(size=h).tolist()},
                            {"weight": rng.normal(size=(h, h)).tolist(), "bias": rng.normal(size=h).tolist()},
                        ],
                    },
                ],
                "readout": {
                    "weight": rng.normal(size=(classes, h)).tolist(),
                    "bias": rng.normal(size=classes).tolist(),
                },
            }
            n = int(rng.integers(1, 9))
            edges = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4}
            g = Graph(n, edges, np.asarray(rng.normal(size=(n, d))))
            w = weights_from_json_dict(doc)
            expected = int(np.argmax(dense_gin_scores(doc, adjacency_matrix(g), g.node_features)))
            assert gin_predict(w, g) == expected

    def test_permutation_invariance(self, rng):
        doc = constant_weights_dict(d=2, classes=2)
        doc["layers"][0]["mlp"][0]["weight"] = rng.normal(size=(4, 2)).tolist()
        doc["layers"][0]["mlp"][1]["weight"] = rng.normal(size=(4, 4)).tolist()
        doc["readout"]["weight"] = rng.normal(size=(2, 4)).tolist()
        w = weights_from_json_dict(doc)
        n = 6
        edges = {(0, 1), (1, 2), (2, 3), (0, 4), (4, 5)}
        feats = rng.normal(size=(n, 2))
        g = Graph(n, edges, feats)
        perm = rng.permutation(n)
        inv = np.argsort(perm)
        permuted = Graph(
            n,
            {tuple(sorted((int(perm[u]), int(perm[v])))) for u, v in edges},
            feats[inv],
        )
        assert gin_predict(w, g) == gin_predict(w, permuted)

    def test_feature_width_mismatch(self):
        w = weights_from_json_dict(constant_weights_dict(d=3))
        with pytest.raises(WeightFormatError):
            gin_predict(w, path_graph(2, d=2))

    def test_argmax_tie_breaks_small_index(self):
        doc = constant_weights_dict(classes=4)
        doc["readout"]["bias"] = [0.0, 0.0, 0.0, 0.0]
        w = weights_from_json_dict(doc)
        assert gin_predict(w, path_graph(2, d=2)) == 0


class TestWeightFile:
    def test_round_trip(self, tmp_path, rng):
        doc = constant_weights_dict()
        doc["layers"][0]["eps"] = 0.25
        doc["metadata"] = {"note": "fixture"}
        w = weights_from_json_dict(doc)
        path = tmp_path / "weights.json"
        save_weights(w, path)
        w2 = load_weights(path)
        assert weights_to_json_dict(w2) == weights_to_json_dict(w)
        assert w2.metadata == {"note": "fixture"}

    def test_shape_chain_violation(self):
        doc = constant_weights_dict()
        doc["layers"][0]["mlp"][1]["weight"] = [[0.0, 0.0, 0.0]]  # wrong fan-in
        with pytest.raises(WeightFormatError):
            weights_from_json_dict(doc)

    def test_readout_class_mismatch(self):
        doc = constant_weights_dict(classes=3)
        doc["readout"]["weight"] = doc["readout"]["weight"][:2]
        doc["readout"]["bias"] = doc["readout"]["bias"][:2]
        with pytest.raises(WeightFormatError):
            weights_from_json_dict(doc)

    def test_single_class_rejected(self):
        doc = constant_weights_dict(classes=2)
        doc["num_classes"] = 1
        doc["readout"]["weight"] = doc["readout"]["weight"][:1]
        doc["readout"]["bias"] = [0.0]
        with pytest.raises(WeightFormatError):
            weights_from_json_dict(doc)

    def test_missing_field(self):
        with pytest.raises(WeightFormatError):
            weights_from_json_dict({"input_dim": 2})

    def test_victim_wrapper(self, tmp_path):
        save_weights(weights_from_json_dict(constant_weights_dict()), tmp_path / "w.json")
        victim = GinVictim.from_file(tmp_path / "w.json")
        assert victim.num_classes() == 3
        assert victim.predict(path_graph(2, d=2)) == 0
