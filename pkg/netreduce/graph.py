"""
weighted directed networks, node partitions and their block decomposition
"""

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-6


class WeightedDigraph():
    """
    Dense weighted digraph. Entry (i, j) of `weights` is the weight of the edge j -> i,
    so row i holds the incoming interactions of node i.
    """
    weights = None

    def __init__(self, weights):
        weights = np.array(weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise ValueError(f'weights must be a square matrix, got shape {weights.shape}')
        if weights.shape[0] < 1:
            raise ValueError('a network needs at least one node')
        if not np.all(np.isfinite(weights)):
            raise ValueError('weights must be finite')
        weights.flags.writeable = False
        self.weights = weights

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  Nodes: {self.n_nodes}\n"
        s += f"  Non-zero weights: {np.count_nonzero(self.weights)}\n"
        s += f"  Strictly positive: {self.is_positive}\n"
        return s

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    __hash__ = None

    @property
    def n_nodes(self):
        return self.weights.shape[0]

    @property
    def is_positive(self):
        return bool(np.all(self.weights > 0))

    def in_degrees(self):
        return self.weights.sum(axis=1)

    def out_degrees(self):
        return self.weights.sum(axis=0)


class Partition():
    """
    Node -> group map. Groups are labelled 0..n-1 internally; `labels` keeps the
    user-facing label of every internal group.
    """
    assignment = None
    labels     = None

    def __init__(self, assignment, labels=None):
        assignment = np.array(assignment, dtype=np.int64)
        if assignment.ndim != 1 or assignment.size == 0:
            raise ValueError('assignment must be a non-empty 1D sequence of group indices')
        if assignment.min() < 0:
            raise ValueError('group indices must be non-negative')
        n_groups = int(assignment.max()) + 1
        sizes = np.bincount(assignment, minlength=n_groups)
        if np.any(sizes == 0):
            empty = np.flatnonzero(sizes == 0).tolist()
            raise ValueError(f'empty group(s): {empty}')
        if labels is None:
            labels = list(range(n_groups))
        if len(labels) != n_groups:
            raise ValueError(f'{len(labels)} labels given for {n_groups} groups')
        assignment.flags.writeable = False
        self.assignment = assignment
        self.labels = tuple(labels)

    @classmethod
    def from_labels(cls, node_labels):
        """Build a partition from arbitrary per-node labels, groups ordered by sorted label."""
        uniq, inverse = np.unique(np.asarray(node_labels), return_inverse=True)
        return cls(inverse.ravel(), labels=uniq.tolist())

    @classmethod
    def from_groups(cls, groups, n_nodes=None):
        """Build a partition from a list of node-index collections."""
        n_nodes = sum(len(g) for g in groups) if n_nodes is None else n_nodes
        assignment = np.full(n_nodes, -1, dtype=np.int64)
        for nu, group in enumerate(groups):
            idx = np.asarray(list(group), dtype=np.int64)
            if np.any(assignment[idx] >= 0):
                raise ValueError('groups must be disjoint')
            assignment[idx] = nu
        if np.any(assignment < 0):
            raise ValueError('groups must cover every node')
        return cls(assignment)

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  Nodes: {self.n_nodes}\n"
        s += f"  Groups: {self.n_groups}\n"
        s += f"  Sizes: {self.sizes.tolist()}\n"
        s += f"  Canonical: {self.is_canonical}\n"
        return s

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None

    @property
    def n_nodes(self):
        return self.assignment.size

    @property
    def n_groups(self):
        return len(self.labels)

    @property
    def sizes(self):
        return np.bincount(self.assignment, minlength=self.n_groups)

    @property
    def index_map(self):
        # offset of every group, p_nu(i) = index_map[nu] + i once canonical
        return np.concatenate(([0], np.cumsum(self.sizes)[:-1]))

    @property
    def is_canonical(self):
        return bool(np.all(np.diff(self.assignment) >= 0))

    def groups(self):
        return [np.flatnonzero(self.assignment == nu) for nu in range(self.n_groups)]

    def same_groups(self, other):
        """True when both partitions group the nodes identically, whatever the group order."""
        if self.n_nodes != other.n_nodes or self.n_groups != other.n_groups:
            return False
        return {tuple(g) for g in self.groups()} == {tuple(g) for g in other.groups()}

    def is_refinement_of(self, coarse):
        if self.n_nodes != coarse.n_nodes:
            return False
        return all(np.unique(coarse.assignment[g]).size == 1 for g in self.groups())


@dataclass(frozen=True)
class BlockView:
    """Blocks W_{nu rho} (m_nu x m_rho) and the diagonals of K_{nu rho} (length m_nu)."""
    blocks: list
    degree_blocks: list
    sizes: np.ndarray = field(repr=False)

    @property
    def n_groups(self):
        return len(self.blocks)

    def assemble(self):
        return np.block(self.blocks)

    def in_degrees(self):
        return np.concatenate([np.sum(row, axis=0) for row in self.degree_blocks])


##########################################################
def block_decompose(W:WeightedDigraph, P:Partition) -> BlockView:
    if P.n_nodes != W.n_nodes:
        raise ValueError(f'partition covers {P.n_nodes} nodes but the network has {W.n_nodes}')
    if not P.is_canonical:
        raise ValueError('partition is not canonical, call canonicalize() first')

    bounds = np.concatenate(([0], np.cumsum(P.sizes)))
    blocks, degree_blocks = [], []
    for nu in range(P.n_groups):
        row_blocks, row_degrees = [], []
        for rho in range(P.n_groups):
            block = W.weights[bounds[nu]:bounds[nu+1], bounds[rho]:bounds[rho+1]]
            row_blocks.append(block)
            row_degrees.append(block.sum(axis=1))
        blocks.append(row_blocks)
        degree_blocks.append(row_degrees)
    return BlockView(blocks=blocks, degree_blocks=degree_blocks, sizes=P.sizes)


def canonicalize(W:WeightedDigraph, P:Partition):
    """
    Sort nodes by group (stable). Returns (permutation, permuted graph, permuted partition)
    where permutation[k] is the original index of the node now at position k.
    """
    if P.n_nodes != W.n_nodes:
        raise ValueError(f'partition covers {P.n_nodes} nodes but the network has {W.n_nodes}')
    perm = np.argsort(P.assignment, kind='stable')
    W_c = WeightedDigraph(W.weights[np.ix_(perm, perm)])
    P_c = Partition(P.assignment[perm], labels=P.labels)
    return perm, W_c, P_c


def restore_order(values, permutation):
    """Map a per-node vector from canonical order back to the original node order."""
    values = np.asarray(values)
    out = np.empty_like(values)
    out[permutation] = values
    return out


def positify(W:WeightedDigraph, epsilon=DEFAULT_EPSILON) -> WeightedDigraph:
    if epsilon <= 0:
        raise ValueError(f'epsilon must be positive, got {epsilon}')
    if np.any(W.weights < 0):
        raise ValueError('negative weights are not supported')
    zeros = W.weights == 0
    n_fill = int(zeros.sum())
    if n_fill == 0:
        return W
    logger.info(f'positify: {n_fill} missing interactions set to {epsilon:g}')
    return WeightedDigraph(np.where(zeros, epsilon, W.weights))


def scale_weights(W:WeightedDigraph, d) -> WeightedDigraph:
    if d < 0:
        raise ValueError(f'scale factor must be non-negative, got {d}')
    return WeightedDigraph(W.weights * d)
