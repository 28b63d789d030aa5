import numpy as np
import pytest

from netreduce.netgen import (SbmSpec, HetSpec, sbm_generate, het_generate, expected_sbm_matrix, hidden_degrees,
                              connection_probabilities, correlated_uniforms, clip_rate)

TWO_GROUP_DENSITIES = np.array([[0.3, 0.05], [0.1, 0.6]])


def test_sbm_full_and_empty():
    W, P = sbm_generate(SbmSpec(sizes=(3, 4), densities=np.ones((2, 2)), seed=1))
    np.testing.assert_array_equal(W.weights, np.ones((7, 7)) - np.eye(7))
    np.testing.assert_array_equal(P.sizes, [3, 4])

    W, _ = sbm_generate(SbmSpec(sizes=(3, 4), densities=np.zeros((2, 2)), seed=1))
    assert not W.weights.any()


def test_sbm_direction_and_weight():
    # only edges from group 1 into group 0
    W, _ = sbm_generate(SbmSpec(sizes=(2, 3), densities=np.array([[0.0, 1.0], [0.0, 0.0]]), weight=0.5, seed=3))
    np.testing.assert_array_equal(W.weights[:2, 2:], 0.5)
    assert W.weights.sum() == pytest.approx(0.5 * 6)


def test_sbm_block_densities_match():
    sizes = (100, 100)
    W, P = sbm_generate(SbmSpec(sizes=sizes, densities=TWO_GROUP_DENSITIES, seed=7))
    groups = P.groups()
    for nu in range(2):
        for rho in range(2):
            block = W.weights[np.ix_(groups[nu], groups[rho])]
            n_pairs = sizes[nu] * sizes[rho] - (sizes[nu] if nu == rho else 0)
            p = TWO_GROUP_DENSITIES[nu, rho]
            sigma = np.sqrt(p * (1 - p) / n_pairs)
            assert abs(block.sum() / n_pairs - p) < 4 * sigma


def test_sbm_seed_determinism():
    spec = SbmSpec(sizes=(20, 30), densities=TWO_GROUP_DENSITIES, seed=11)
    assert sbm_generate(spec)[0] == sbm_generate(spec)[0]
    assert sbm_generate(spec)[0] != sbm_generate(SbmSpec(sizes=(20, 30), densities=TWO_GROUP_DENSITIES, seed=12))[0]


def test_expected_matrix():
    W, P = expected_sbm_matrix(SbmSpec(sizes=(2, 1), densities=TWO_GROUP_DENSITIES, weight=2.0))
    np.testing.assert_allclose(W.weights, 2.0 * np.array([[0.3, 0.3, 0.05], [0.3, 0.3, 0.05], [0.1, 0.1, 0.6]]))
    np.testing.assert_array_equal(P.assignment, [0, 0, 1])


def test_spec_validation():
    with pytest.raises(ValueError):
        SbmSpec(sizes=(2, 2), densities=np.ones((3, 3)))
    with pytest.raises(ValueError):
        SbmSpec(sizes=(2, 0), densities=np.ones((2, 2)))
    with pytest.raises(ValueError):
        SbmSpec(sizes=(2, 2), densities=np.full((2, 2), 1.5))
    with pytest.raises(ValueError):
        HetSpec(sizes=(2, 2), densities=np.ones((2, 2)), half_width=2.0)
    with pytest.raises(ValueError):
        HetSpec(sizes=(2, 2), densities=np.ones((2, 2)), rho_inout=1.5)


def test_het_zero_width_reduces_to_sbm(rng):
    spec = HetSpec(sizes=(4, 6), densities=TWO_GROUP_DENSITIES, half_width=0.0)
    prob = connection_probabilities(spec, *hidden_degrees(spec, rng))
    groups = np.repeat([0, 1], [4, 6])
    expected = TWO_GROUP_DENSITIES[np.ix_(groups, groups)]
    np.fill_diagonal(expected, 0.0)
    np.testing.assert_allclose(prob, expected)


def test_het_hidden_degree_means(rng):
    spec = HetSpec(sizes=(100, 100), densities=TWO_GROUP_DENSITIES)
    kappa_in, kappa_out = hidden_degrees(spec, rng)
    # node 0 is in group 0: mean in-degree from group 1 is m_1 p[0, 1]
    assert kappa_in[:100, 1].mean() == pytest.approx(100 * 0.05, rel=0.1)
    assert kappa_out[100:, 0].mean() == pytest.approx(100 * 0.05, rel=0.1)
    assert np.all(kappa_in[:100, 0] >= 0.5 * 30) and np.all(kappa_in[:100, 0] <= 1.5 * 30)


def test_het_in_out_correlation(rng):
    spec = HetSpec(sizes=(150, 150), densities=TWO_GROUP_DENSITIES, rho_inout=0.8)
    kappa_in, kappa_out = hidden_degrees(spec, rng)
    own = np.repeat([0, 1], 150)
    k_in = kappa_in[np.arange(300), own]
    k_out = kappa_out[np.arange(300), own]
    for nodes in (slice(0, 150), slice(150, 300)):
        r = np.corrcoef(k_in[nodes], k_out[nodes])[0, 1]
        assert 0.7 <= r <= 0.9


def test_correlated_uniforms_marginals(rng):
    u, v = correlated_uniforms(20_000, 0.5, rng)
    assert 0 <= u.min() and u.max() <= 1
    assert v.mean() == pytest.approx(0.5, abs=0.01)
    assert np.corrcoef(u, v)[0, 1] == pytest.approx(0.5, abs=0.03)


def test_het_realized_in_degrees_follow_hidden_degrees():
    spec = HetSpec(sizes=(50, 50), densities=np.array([[0.4, 0.2], [0.3, 0.5]]), seed=5)
    kappa_in, kappa_out = hidden_degrees(spec, np.random.default_rng(0))
    prob = connection_probabilities(spec, kappa_in, kappa_out)
    realised = np.zeros(100)
    n_real = 200
    rng = np.random.default_rng(1)
    for _ in range(n_real):
        realised += (rng.random(prob.shape) < prob)[:, 50:].sum(axis=1)
    realised /= n_real
    expected = prob[:, 50:].sum(axis=1)
    sigma = np.sqrt((prob[:, 50:] * (1 - prob[:, 50:])).sum(axis=1) / n_real)
    assert np.all(np.abs(realised - expected) < 4.5 * sigma)


def test_het_seed_determinism_and_no_self_loops():
    spec = HetSpec(sizes=(30, 30), densities=TWO_GROUP_DENSITIES, seed=99)
    W1, P = het_generate(spec)
    W2, _ = het_generate(spec)
    assert W1 == W2
    assert not np.diag(W1.weights).any()
    np.testing.assert_array_equal(P.sizes, [30, 30])


def test_clip_rate_counts_node_pairs():
    assert clip_rate(np.array([[0.0, 2.0], [0.5, 0.0]])) == 0.5
    assert clip_rate(np.zeros((1, 1))) == 0.0


@pytest.mark.parametrize('p, clipped', [(0.6, True), (0.3, False)])
def test_connection_probability_clipping(p, clipped, caplog):
    spec = HetSpec(sizes=(5,), densities=np.array([[p]]))
    # every hidden degree at the top of its range: p_ij = 2.25 p
    kappa = np.full((5, 1), 1.5 * 5 * p)
    with caplog.at_level('INFO', logger='netreduce.netgen'):
        prob = connection_probabilities(spec, kappa, kappa)
    assert prob.max() <= 1.0
    assert not np.diag(prob).any()
    warned = any(r.levelname == 'WARNING' and 'half_width' in r.getMessage() for r in caplog.records)
    assert warned == clipped
    if not clipped:
        np.testing.assert_allclose(prob[~np.eye(5, dtype=bool)], 2.25 * p)
