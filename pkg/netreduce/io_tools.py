"""
file formats: edge lists, dense matrices, partitions and reduction exports
"""

import json
import logging
import os

import numpy as np
import pandas as pd

from .graph import WeightedDigraph, Partition

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


##########################################################
def read_edgelist(path, n_nodes=None) -> WeightedDigraph:
    """CSV `src,dst,weight`, 0-based ids; edge (src, dst, w) sets w_{dst, src}."""
    df = pd.read_csv(path)
    missing = {'src', 'dst', 'weight'} - set(df.columns)
    if missing:
        raise ValueError(f'{path}: missing column(s) {sorted(missing)}')
    src = df['src'].to_numpy(dtype=np.int64)
    dst = df['dst'].to_numpy(dtype=np.int64)
    if src.size and min(src.min(), dst.min()) < 0:
        raise ValueError(f'{path}: node ids must be non-negative')
    top = int(max(src.max(), dst.max())) + 1 if src.size else 0
    n_nodes = top if n_nodes is None else n_nodes
    if top > n_nodes:
        raise ValueError(f'{path}: node id {top - 1} out of range for {n_nodes} nodes')
    weights = np.zeros((n_nodes, n_nodes))
    np.add.at(weights, (dst, src), df['weight'].to_numpy(dtype=np.float64))
    return WeightedDigraph(weights)


def write_edgelist(W:WeightedDigraph, path):
    dst, src = np.nonzero(W.weights)
    order = np.lexsort((dst, src))
    df = pd.DataFrame({'src': src[order], 'dst': dst[order], 'weight': W.weights[dst[order], src[order]]})
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_matrix(path) -> WeightedDigraph:
    """CSV of N rows x N reals, row i = incoming weights of node i."""
    return WeightedDigraph(pd.read_csv(path, header=None).to_numpy(dtype=np.float64))


def write_matrix(matrix, path):
    pd.DataFrame(np.asarray(matrix)).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)


def read_partition(path, n_nodes=None) -> Partition:
    df = pd.read_csv(path)
    missing = {'node', 'group'} - set(df.columns)
    if missing:
        raise ValueError(f'{path}: missing column(s) {sorted(missing)}')
    df = df.sort_values('node')
    nodes = df['node'].to_numpy(dtype=np.int64)
    if not np.array_equal(nodes, np.arange(nodes.size)):
        raise ValueError(f'{path}: every node 0..N-1 must appear exactly once')
    if n_nodes is not None and nodes.size != n_nodes:
        raise ValueError(f'{path}: partition covers {nodes.size} nodes, network has {n_nodes}')
    return Partition.from_labels(df['group'].to_numpy())


def write_partition(P:Partition, path):
    labels = np.asarray(P.labels, dtype=object)[P.assignment]
    pd.DataFrame({'node': np.arange(P.n_nodes), 'group': labels}).to_csv(path, index=False)


##########################################################
def write_reduction(out_dir, vectors, R, P:Partition, permutation, extra=None):
    """
    W_reduced.csv, mu.csv, vectors.csv (`group,node,weight`, original node ids and
    group labels) and reduction.json with the method tag and per-group errors.
    """
    os.makedirs(out_dir, exist_ok=True)
    write_matrix(R.W_reduced, os.path.join(out_dir, 'W_reduced.csv'))
    write_matrix(R.mu, os.path.join(out_dir, 'mu.csv'))

    rows, start = [], 0
    for nu, a in enumerate(vectors.partials):
        for i, w in enumerate(a):
            rows.append((P.labels[nu], int(permutation[start + i]), float(w)))
        start += a.size
    pd.DataFrame(rows, columns=['group', 'node', 'weight']).to_csv(os.path.join(out_dir, 'vectors.csv'),
                                                                   index=False, float_format=FLOAT_FORMAT)
    summary = {'method': vectors.method,
               'n_groups': int(vectors.n),
               'groups': [_jsonable(l) for l in P.labels],
               'sizes': [int(m) for m in vectors.sizes],
               'per_group_error': None if vectors.per_group_error is None else [float(e) for e in vectors.per_group_error]}
    if extra:
        summary.update(extra)
    write_json(summary, os.path.join(out_dir, 'reduction.json'))
    return summary


def write_json(obj, path):
    with open(path, 'w') as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write('\n')


def _jsonable(value):
    return value.item() if isinstance(value, np.generic) else value
