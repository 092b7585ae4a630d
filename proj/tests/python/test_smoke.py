"""End-to-end smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import graphspde as gs


@pytest.fixture(scope="module")
def toy_graph():
    g = gs.sbm_generate([15, 15], 0.3, 0.05, 7)
    g.labels = gs.sbm_block_labels([15, 15])
    rng = np.random.default_rng(0)
    means = rng.normal(size=(2, 4))
    means = 2.0 * means / np.linalg.norm(means, axis=1, keepdims=True)
    g.features = means[np.array(g.labels)] + 0.4 * rng.normal(size=(30, 4))
    return g


def test_graph_basics():
    g = gs.Graph([(0, 1), (1, 2), (0, 2)], 3)
    assert g.num_nodes == 3
    assert g.num_edges == 3
    assert g.degree(0) == 2
    assert g.has_edge(0, 1) and not g.has_edge(0, 0)


def test_laplacian_and_eigendecompose():
    g = gs.Graph([(0, 1)], 2)
    L = gs.laplacian(g)
    assert np.allclose(L, [[1, -1], [-1, 1]])
    basis = gs.eigendecompose(g)
    assert np.allclose(sorted(basis.eigenvalues), [0.0, 2.0])


def test_matern_kernel_hand_values():
    g = gs.Graph([(0, 1)], 2)
    K = gs.matern_kernel(gs.eigendecompose(g), nu=1.0, kappa=math.sqrt(2.0))
    assert np.allclose(K, [[2 / 3, 1 / 3], [1 / 3, 2 / 3]])


def test_chebyshev_matches_exact(toy_graph):
    basis = gs.eigendecompose(toy_graph)
    K = gs.matern_kernel(basis, nu=2.5, kappa=1.0)
    bound = gs.lambda_max_bound(toy_graph)
    cheb = gs.chebyshev_fit("matern", 2.5, 1.0, 80, bound)
    v = np.random.default_rng(1).normal(size=(30, 1))
    exact = K @ v
    approx = gs.chebyshev_apply(toy_graph, cheb, v)
    assert np.linalg.norm(approx - exact) / np.linalg.norm(exact) < 1e-6


def test_phi_wiener_starts_at_zero(toy_graph):
    basis = gs.eigendecompose(toy_graph)
    times, values = gs.simulate_phi_wiener(basis, "matern", 1.0, 1.0,
                                           [0.0, 0.5, 1.0], 3)
    assert times[0] == 0.0
    assert np.all(values[0] == 0.0)
    assert values.shape == (3, 30)


def test_empirical_covariance_identity():
    rng = np.random.default_rng(2)
    samples = rng.normal(size=(40000, 3))
    cov, se = gs.empirical_covariance(samples)
    assert np.abs(cov - np.eye(3)).max() < 5 / math.sqrt(40000)
    assert se.min() > 0


def test_li_fixtures():
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    edges += [(4 + i, 4 + j) for i in range(4) for j in range(i + 1, 4)]
    g = gs.Graph(edges, 8)
    labels = [0, 0, 0, 0, 1, 1, 1, 1]
    assert gs.label_informativeness(g, labels) == 1.0
    assert gs.edge_homophily(g, labels) == 1.0


def test_ood_metrics_values():
    r = gs.ood_metrics([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    assert r["auc"] == pytest.approx(0.75)
    perfect = gs.ood_metrics([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert perfect["auc"] == 1.0
    assert perfect["fpr95"] == 0.0
    assert perfect["det_acc"] == 1.0


def test_rewire_identity(toy_graph):
    basis = gs.eigendecompose(toy_graph)
    K = gs.matern_kernel(basis, nu=0.5, kappa=1.0)
    same = gs.rewire_by_covariance(toy_graph, K, 0.0, 100.0, 50)
    assert same.edge_list() == toy_graph.edge_list()
    report = gs.rewire_report(toy_graph, same, toy_graph.labels)
    assert report["edges_removed"] == 0 and report["edges_added"] == 0


def test_train_and_uncertainty(toy_graph):
    train_idx = [i for i in range(30) if i % 3 != 0]
    val_idx = [i for i in range(30) if i % 3 == 0]
    model = gs.train_model(toy_graph, "sispde-matern", 0.5, 1.0, train_idx, val_idx,
                           hidden_dim=8, steps=5, max_epochs=30, patience=30, seed=3)
    hist = model.history
    assert hist[-1][1] < hist[0][1]  # training loss decreased
    u = model.uncertainty(8, 11)
    epi = np.array(u["epistemic"])
    total = np.array(u["total"])
    alea = np.array(u["aleatoric"])
    assert epi.min() >= 0.0
    assert np.allclose(np.maximum(total - alea, 0.0), epi)
    probs = np.array(model.predict_probs(4, 11))
    assert probs.shape == (4, 30, 2)
    assert np.allclose(probs.sum(axis=2), 1.0, atol=1e-9)


def test_dataset_roundtrip(tmp_path, toy_graph):
    gs.save_dataset(toy_graph, str(tmp_path / "ds"))
    back = gs.load_dataset(str(tmp_path / "ds"))
    assert back.num_nodes == toy_graph.num_nodes
    assert back.edge_list() == toy_graph.edge_list()
    assert back.labels == toy_graph.labels
    assert np.allclose(back.features, toy_graph.features)
