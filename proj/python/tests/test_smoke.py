import json
import math

import pytest

import confsd


def test_graph_and_spectrum():
    g = confsd.make_graph("complete:5")
    assert g.num_nodes == 5
    assert g.num_edges == 10
    assert abs(confsd.spectral_radius(g) - 4.0) < 1e-6
    c4 = confsd.Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert abs(confsd.spectral_radius(c4) - 2.0) < 1e-6
    assert c4.neighbors(0) == [1, 3]


def test_scores_gamma_and_shrink():
    pi = [0.5, 0.3, 0.2]
    assert confsd.score("pre", pi, [1]) == pytest.approx(-0.4)
    assert confsd.score("rec", pi, [1]) == pytest.approx(0.8)
    assert confsd.score("min", pi, [1]) == -0.3
    fig = [0.35, 0.25, 0.15, 0.12, 0.08, 0.05]
    assert confsd.gamma(fig, [0, 1, 3]) == [0, 1, 2, 3]
    assert confsd.shrink(fig, [0, 1, 3], 1 / 3) == [0, 1]
    assert confsd.finite_sample_quantile(list(range(1, 10)), 0.1) == 9
    assert math.isinf(confsd.finite_sample_quantile([1, 2, 3, 4, 5], 0.01))


def test_calibrate_predict_round_trip():
    g = confsd.make_graph("ba:80:2", 1)
    data = confsd.simulate_dataset(g, 120, seed=3, r0=(1.0, 6.0), sources=(1, 4))
    probs = [confsd.estimate("heuristic", s, g) for s in data]
    model = confsd.calibrate(probs[:100], [s.sources for s in data[:100]], "min", 0.1, 0.3)
    assert model.n_cal == 100
    for s, pi in zip(data[100:], probs[100:]):
        c = model.predict(pi)
        assert c == sorted(c)
    lam, crc_set = confsd.crc_predict(probs[:100], [s.sources for s in data[:100]], 0.1, 0.3, probs[100])
    assert crc_set == model.predict(probs[100])
    assert lam == pytest.approx(1 + model.q_hat, abs=1e-12)
    small = [0.9, 0.4, 0.4, 0.1]
    assert confsd.cqioc_bruteforce(small, -0.4, "min") == [0, 1, 2]
    ev = confsd.evaluate_set(list(range(10)), list(range(10)), 0.3)
    assert ev["included"] and ev["precision"] == 1.0


def test_equivalence_checks_pass():
    ok, report = confsd.check_equivalences(8, 100, 1)
    assert ok, report
    assert "PASS" in report


def test_small_experiment():
    cfg = {
        "graph": "ba:50:2",
        "r0": [1, 5],
        "sources": [1, 3],
        "n_cal": 40,
        "n_test": 10,
        "n_trials": 2,
        "levels": [[0.1, 0.3]],
        "estimators": ["heuristic"],
        "scores": ["rec"],
    }
    cells = confsd.run_experiment(json.dumps(cfg))
    assert len(cells) == 1
    assert 0.0 <= cells[0]["inclusion_mean"] <= 1.0
    with pytest.raises(ValueError, match="n_trial"):
        confsd.run_experiment(json.dumps({"n_trial": 1}))


def test_cli_in_process():
    code, out, _ = confsd.cli(["oracle-check", "--n", "6", "--trials", "30", "--seed", "2"])
    assert code == 0
    assert "PASS" in out
    code, _, err = confsd.cli(["simulate", "--bogus"])
    assert code == 1
