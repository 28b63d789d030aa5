"""
loaders for real networks (data not bundled): undirected contact networks and
bipartite plant-pollinator incidence tables
"""

import logging

import networkx as nx
import numpy as np
import pandas as pd

from .graph import WeightedDigraph, Partition

logger = logging.getLogger(__name__)


def load_undirected_edgelist(path, delimiter=None, weighted=False):
    """
    Whitespace (or `delimiter`) separated edge list `u v [w]`; each undirected edge
    gives w_uv = w_vu. Nodes are relabelled 0..N-1 in sorted order.
    """
    G = nx.read_edgelist(path, delimiter=delimiter, nodetype=str,
                         data=[('weight', float)] if weighted else False)
    nodes = sorted(G.nodes(), key=_node_key)
    weights = nx.to_numpy_array(G, nodelist=nodes, weight='weight' if weighted else None)
    logger.info(f'{path}: {len(nodes)} nodes, {G.number_of_edges()} undirected edges')
    return WeightedDigraph(weights), nodes


def load_bipartite(path, index_col=0):
    """
    Incidence table with one class of nodes as rows (e.g. plants) and the other as
    columns (e.g. pollinators); non-zero cells are interactions. Returns the symmetric
    adjacency matrix and the two-group partition (rows first).
    """
    table = pd.read_csv(path, index_col=index_col)
    incidence = (table.to_numpy(dtype=np.float64) != 0).astype(np.float64)
    n_rows, n_cols = incidence.shape
    weights = np.zeros((n_rows + n_cols, n_rows + n_cols))
    weights[:n_rows, n_rows:] = incidence
    weights[n_rows:, :n_rows] = incidence.T
    labels = [str(l) for l in table.index] + [str(l) for l in table.columns]
    P = Partition(np.repeat([0, 1], [n_rows, n_cols]))
    logger.info(f'{path}: {n_rows} + {n_cols} nodes, {int(incidence.sum())} interactions')
    return WeightedDigraph(weights), P, labels


def _node_key(node):
    return (0, int(node), '') if node.lstrip('-').isdigit() else (1, 0, node)
