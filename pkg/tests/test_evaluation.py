import numpy as np
import pytest

from logpr.embedding import EmbeddingConfig
from logpr.evaluation import (PAPER_TABLE1, approximation_error, baseline_vectors,
                              caption_alpha_check, expectation_oracle_ar1,
                              expected_bbt_closed_form, expected_bbt_explicit, format_table1,
                              joint_correlation, lemma1_cosine, paper_value, parse_row,
                              rayleigh_quotient, reproduce_table1, subspace_angle, table1_csv,
                              trial_seed, variance_study)
from logpr.errors import GraphError
from logpr.generators import chain, knn_geometric
from logpr.spectral import spectral_embedding

from conftest import circulant, complete, cycle


@pytest.mark.parametrize("metric", ["random-walk", "normalized", "combinatorial"])
def test_baseline_has_zero_error(metric):
    g = knn_geometric(200, 5, rng_seed=1)
    from logpr.evaluation import laplacian_for_metric
    b = spectral_embedding(g, 1, laplacian_for_metric(metric))
    z2 = baseline_vectors(g, b, metric)[:, 0]
    r = approximation_error(g, z2, z2, metric)
    assert r.error == 0 and r.s == pytest.approx(r.p)
    if metric != "combinatorial":
        assert r.s == pytest.approx(b.eigenvalues[1], rel=1e-9)


def test_rayleigh_random_walk_hand_value():
    g = chain(3)  # degrees 1, 2, 1
    u = np.array([1.0, 0.0, -1.0])
    # u^T L u / u^T D u = (1 + 1) / (1 + 1)
    assert rayleigh_quotient(g, u, "random-walk") == pytest.approx(1.0)
    assert rayleigh_quotient(g, u, "combinatorial") == pytest.approx(1.0)
    with pytest.raises(ValueError):
        rayleigh_quotient(g, u, "bogus")


def test_error_sign_and_magnitude():
    g = chain(30)
    b = spectral_embedding(g, 2)
    Y = baseline_vectors(g, b)
    u = Y[:, 0] + 0.3 * Y[:, 1]
    r = approximation_error(g, u, Y[:, 0])
    assert r.error < 0 and r.magnitude == -r.error
    with pytest.raises(ValueError):
        approximation_error(g, np.zeros(30), Y[:, 0])
    with pytest.raises(ValueError):
        approximation_error(g, Y[:5, 0], Y[:, 0])


def test_joint_correlation():
    z = np.linspace(-1, 1, 11)
    r, pts = joint_correlation(-2 * z, z)
    assert r == pytest.approx(1.0)
    np.testing.assert_allclose(pts[:, 1], 2 * z)
    with pytest.raises(ValueError):
        joint_correlation(np.ones(3), z[:3])


def test_subspace_angle_rotation_invariant(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((50, 2)))
    R = np.array([[np.cos(1.0), -np.sin(1.0)], [np.sin(1.0), np.cos(1.0)]])
    assert subspace_angle(Q @ R, Q) < 1e-7
    e = np.eye(50)
    assert subspace_angle(e[:, :1], e[:, 1:2]) == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError, match="rank"):
        subspace_angle(np.ones((50, 2)), Q)


def test_lemma1_cycle():
    g = cycle(100)
    assert lemma1_cosine(g, 0, 0.9999) > lemma1_cosine(g, 0, 0.99) > 0.9


def test_trial_seed_stable():
    assert trial_seed(0, 0) == 7896617691693857887
    assert trial_seed(0, 1) == 2918264622725855778
    assert len({trial_seed(5, t) for t in range(100)}) == 100


def test_ar1_two_ways_agree():
    for g in (cycle(8), complete(5), circulant(10, [1, 3])):
        E1 = expected_bbt_explicit(g, [1, 2, 3])
        E2 = expected_bbt_closed_form(g, [1, 2, 3])
        np.testing.assert_allclose(E1, E2, atol=1e-12)


def test_ar1_eigenspaces():
    rep = expectation_oracle_ar1(cycle(12), [3, 5])
    assert rep.agreement <= 1e-10
    assert rep.max_angle <= 1e-6
    assert sum(e.dimension for e in rep.eigenspaces) == 12
    assert not rep.degenerate
    # K_n: every nontrivial walk eigenvalue is the same
    kn = expectation_oracle_ar1(complete(6), [2, 2])
    assert [e.dimension for e in kn.eigenspaces] == [1, 5]


def test_ar1_needs_regular():
    with pytest.raises(GraphError, match="regular"):
        expectation_oracle_ar1(chain(5), [1])
    with pytest.raises(ValueError, match="budget"):
        expected_bbt_explicit(cycle(20), [1] * 6)


def test_variance_study_small():
    g = chain(200)
    rows = variance_study(g, EmbeddingConfig(alpha=0.99), trials=4, sample_fractions=(0.05, 0.2))
    assert [r.samples for r in rows] == [10, 40]
    for r in rows:
        assert r.errors.shape == (4,)
        assert r.spread == pytest.approx(r.max - r.min)
    with pytest.raises(ValueError):
        variance_study(g, EmbeddingConfig(), trials=1)


def test_parse_rows():
    assert parse_row("chain30").label == "30 chain"
    r = parse_row("knn3000")
    assert r.label == "3000-6 nearest neighbour" and r.spec.k == 6
    s = parse_row("sbm(50,60,0.25,0.005)")
    assert s.label in PAPER_TABLE1 and s.spec.n == 50 and s.spec.k == 60
    f = parse_row("file:Mine=/tmp/x.edges")
    assert f.label == "Mine" and f.path == "/tmp/x.edges"
    with pytest.raises(ValueError):
        parse_row("grid10")


def test_paper_values():
    assert paper_value("3000 chain", 0.9999, "log") == 0.75
    assert paper_value("3000 chain", 0.99999, "identity") == 30.38
    assert paper_value("30 chain", 0.99, "log") == 0.47
    assert paper_value("nothing", 0.99, "log") is None


def test_table1_small_row():
    cells = reproduce_table1(["chain30"], alphas=(0.99,), reps=2)
    assert len(cells) == 2
    log_cell = [c for c in cells if c.transform == "log"][0]
    assert log_cell.paper == 0.47 and log_cell.errors.shape == (2,)
    assert log_cell.median <= 0.02
    csv = table1_csv(cells)
    assert csv.startswith("graph,alpha") and "\"30 chain\"" in csv
    assert "30 chain" in format_table1(cells)
    chk = caption_alpha_check(cells, cells)
    assert chk["better"] == "0.9999"
