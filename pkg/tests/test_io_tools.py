import json

import numpy as np
import pandas as pd
import pytest

from netreduce.graph import WeightedDigraph, Partition, canonicalize, positify
from netreduce.netgen import het_generate, HetSpec
from netreduce.reduction import spectral_reduce
from netreduce.io_tools import (read_edgelist, write_edgelist, read_matrix, write_matrix, read_partition,
                                write_partition, write_reduction)
from netreduce.datasets import load_undirected_edgelist, load_bipartite


def test_edgelist_round_trip(tmp_path):
    W, P = het_generate(HetSpec(sizes=(10, 15), densities=np.array([[0.3, 0.05], [0.1, 0.6]]), weight=1 / 3, seed=4))
    write_edgelist(W, tmp_path / 'edges.csv')
    write_partition(P, tmp_path / 'partition.csv')
    assert read_edgelist(tmp_path / 'edges.csv', n_nodes=W.n_nodes) == W
    assert read_partition(tmp_path / 'partition.csv', W.n_nodes) == P


def test_edgelist_orientation(tmp_path):
    pd.DataFrame({'src': [0, 1], 'dst': [1, 2], 'weight': [1.0, 2.0]}).to_csv(tmp_path / 'e.csv', index=False)
    W = read_edgelist(tmp_path / 'e.csv')
    np.testing.assert_array_equal(W.weights, [[0, 0, 0], [1, 0, 0], [0, 2, 0]])


def test_edgelist_errors(tmp_path):
    pd.DataFrame({'src': [0], 'target': [1]}).to_csv(tmp_path / 'bad.csv', index=False)
    with pytest.raises(ValueError, match='weight'):
        read_edgelist(tmp_path / 'bad.csv')
    pd.DataFrame({'src': [0], 'dst': [5], 'weight': [1.0]}).to_csv(tmp_path / 'range.csv', index=False)
    with pytest.raises(ValueError):
        read_edgelist(tmp_path / 'range.csv', n_nodes=3)


def test_matrix_round_trip(tmp_path, rng):
    W = WeightedDigraph(rng.uniform(0, 1, size=(4, 4)))
    write_matrix(W.weights, tmp_path / 'm.csv')
    assert read_matrix(tmp_path / 'm.csv') == W


def test_partition_labels_survive(tmp_path):
    pd.DataFrame({'node': [2, 0, 1], 'group': ['b', 'a', 'b']}).to_csv(tmp_path / 'p.csv', index=False)
    P = read_partition(tmp_path / 'p.csv')
    np.testing.assert_array_equal(P.assignment, [0, 1, 1])
    assert P.labels == ('a', 'b')
    pd.DataFrame({'node': [0, 2], 'group': [0, 1]}).to_csv(tmp_path / 'gap.csv', index=False)
    with pytest.raises(ValueError):
        read_partition(tmp_path / 'gap.csv')


def test_write_reduction_uses_original_ids(tmp_path, rng):
    W = positify(WeightedDigraph(rng.uniform(0, 1, size=(5, 5))))
    P = Partition.from_labels(['x', 'y', 'x', 'y', 'y'])
    perm, Wc, Pc = canonicalize(W, P)
    vectors, R = spectral_reduce(Wc, Pc)
    summary = write_reduction(tmp_path, vectors, R, Pc, perm, extra={'note': 'test'})

    df = pd.read_csv(tmp_path / 'vectors.csv')
    np.testing.assert_allclose(df.groupby('group')['weight'].sum(), 1.0)
    assert set(df[df['group'] == 'x']['node']) == {0, 2}
    assert read_matrix(tmp_path / 'W_reduced.csv').weights.shape == (2, 2)
    with open(tmp_path / 'reduction.json') as fh:
        saved = json.load(fh)
    assert saved == summary
    assert saved['method'] == 'spectral-restricted'
    assert saved['groups'] == ['x', 'y']
    assert saved['note'] == 'test'


def test_load_undirected_edgelist(tmp_path):
    (tmp_path / 'contacts.txt').write_text('1 2\n2 3\n10 1\n')
    W, nodes = load_undirected_edgelist(tmp_path / 'contacts.txt')
    assert nodes == ['1', '2', '3', '10']
    np.testing.assert_array_equal(W.weights, W.weights.T)
    assert W.weights[0, 1] == 1 and W.weights[0, 3] == 1 and W.weights[1, 3] == 0


def test_load_bipartite(tmp_path):
    pd.DataFrame({'a': [1, 0], 'b': [2, 1], 'c': [0, 0]}, index=['p1', 'p2']).to_csv(tmp_path / 'web.csv')
    W, P, labels = load_bipartite(tmp_path / 'web.csv')
    assert labels == ['p1', 'p2', 'a', 'b', 'c']
    np.testing.assert_array_equal(P.sizes, [2, 3])
    np.testing.assert_array_equal(W.weights, W.weights.T)
    assert W.weights.sum() == 2 * 3
    assert not W.weights[:2, :2].any()
