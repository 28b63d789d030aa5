"""
synthetic networks: directed stochastic block model and its heterogeneous
hidden-degree variant
"""

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy import stats

from .graph import WeightedDigraph, Partition

logger = logging.getLogger(__name__)

HALF_WIDTH  = 0.5   # fraction of the mean hidden degree
RHO_INOUT   = 0.8
CLIP_WARN   = 0.01


@dataclass(frozen=True)
class SbmSpec:
    sizes: tuple
    densities: np.ndarray      # p[nu, rho]: density of edges from G_rho to G_nu
    weight: float = 1.0
    seed: int = None

    def __post_init__(self):
        _check_blocks(self.sizes, self.densities)


@dataclass(frozen=True)
class HetSpec:
    sizes: tuple
    densities: np.ndarray
    half_width: float = HALF_WIDTH
    rho_inout: float = RHO_INOUT
    weight: float = 1.0
    seed: int = None

    def __post_init__(self):
        _check_blocks(self.sizes, self.densities)
        if not 0 <= self.half_width <= 1:
            raise ValueError(f'half_width must lie in [0, 1] (fraction of the mean), got {self.half_width}')
        if not -1 <= self.rho_inout <= 1:
            raise ValueError(f'rho_inout must lie in [-1, 1], got {self.rho_inout}')


def _check_blocks(sizes, densities):
    p = np.asarray(densities, dtype=np.float64)
    n = len(sizes)
    if n == 0 or any(int(m) < 1 for m in sizes):
        raise ValueError(f'group sizes must be positive, got {sizes}')
    if p.shape != (n, n):
        raise ValueError(f'density matrix must be {n}x{n}, got shape {p.shape}')
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError('densities must lie in [0, 1]')


def _partition(sizes):
    return Partition(np.repeat(np.arange(len(sizes)), sizes))


def _seed_from(rng, seed):
    if rng is None:
        return seed
    return int(rng.integers(2**32))


##########################################################
def sbm_generate(spec:SbmSpec, rng=None):
    """Directed SBM without self-loops; edge j -> i (i in G_nu, j in G_rho) with probability p[nu, rho]."""
    sizes = [int(m) for m in spec.sizes]
    p = np.asarray(spec.densities, dtype=np.float64)
    # networkx uses probs[a][b] for edges from block a to block b
    G = nx.stochastic_block_model(sizes, p.T.tolist(), directed=True, selfloops=False,
                                  seed=_seed_from(rng, spec.seed))
    N = sum(sizes)
    weights = np.zeros((N, N))
    for src, dst in G.edges():
        weights[dst, src] = spec.weight
    return WeightedDigraph(weights), _partition(sizes)


def expected_sbm_matrix(spec:SbmSpec):
    """Constant-block expectation matrix w_ij = weight * p[nu, rho]."""
    sizes = [int(m) for m in spec.sizes]
    P = _partition(sizes)
    p = np.asarray(spec.densities, dtype=np.float64)
    weights = spec.weight * p[np.ix_(P.assignment, P.assignment)]
    return WeightedDigraph(weights), P


def correlated_uniforms(size, rho, rng):
    """Pairs of U(0, 1) samples with Pearson correlation rho (Gaussian copula)."""
    c = 2 * np.sin(np.pi * rho / 6)  # uniform correlation of a Gaussian copula is (6/pi) asin(c/2)
    z1 = rng.standard_normal(size)
    z2 = c * z1 + np.sqrt(max(1 - c**2, 0.0)) * rng.standard_normal(size)
    return stats.norm.cdf(z1), stats.norm.cdf(z2)


def hidden_degrees(spec:HetSpec, rng):
    """
    kappa_in[i, rho] and kappa_out[i, rho] for every node i, uniform around
    m_rho p[nu, rho] (in) and m_rho p[rho, nu] (out), nu the group of i.
    """
    sizes = np.array([int(m) for m in spec.sizes])
    p = np.asarray(spec.densities, dtype=np.float64)
    groups = _partition(sizes).assignment
    n, N = len(sizes), sizes.sum()

    mean_in  = sizes[None, :] * p[groups, :]
    mean_out = sizes[None, :] * p.T[groups, :]
    u_in  = rng.random((N, n))
    u_out = rng.random((N, n))
    # own-group in/out hidden degrees are correlated
    own = np.arange(N), groups
    u_in[own], u_out[own] = correlated_uniforms(N, spec.rho_inout, rng)

    h = spec.half_width
    kappa_in  = mean_in  * (1 + h * (2 * u_in  - 1))
    kappa_out = mean_out * (1 + h * (2 * u_out - 1))
    return kappa_in, kappa_out


def het_generate(spec:HetSpec, rng=None):
    """
    Edge j -> i (i in G_nu, j in G_rho) with probability
        p_ij = kappa_in[i, rho] kappa_out[j, nu] / (m_nu m_rho p[nu, rho]),
    clamped to [0, 1], no self-loops.
    """
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    kappa_in, kappa_out = hidden_degrees(spec, rng)
    prob = connection_probabilities(spec, kappa_in, kappa_out)
    weights = np.where(rng.random(prob.shape) < prob, spec.weight, 0.0)
    return WeightedDigraph(weights), _partition(spec.sizes)


def connection_probabilities(spec:HetSpec, kappa_in, kappa_out):
    sizes = np.array([int(m) for m in spec.sizes])
    p = np.asarray(spec.densities, dtype=np.float64)
    groups = _partition(sizes).assignment
    num = kappa_in[:, groups] * kappa_out[:, groups].T    # kappa_in[i, g(j)] * kappa_out[j, g(i)]
    den = np.outer(sizes[groups], sizes[groups]) * p[np.ix_(groups, groups)]
    prob = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    np.fill_diagonal(prob, 0.0)

    clipped = int(np.sum(prob > 1))
    rate = clip_rate(prob)
    if clipped:
        logger.info(f'het_generate: {clipped} connection probabilities clipped to 1 ({100 * rate:.2f}% of node pairs)')
    if rate > CLIP_WARN:
        logger.warning(f'het_generate: {100 * rate:.2f}% of node pairs have a connection probability above 1, '
                       f'reduce half_width')
    return np.clip(prob, 0.0, 1.0)


def clip_rate(prob):
    """Fraction of node pairs i != j with p_ij > 1."""
    N = prob.shape[0]
    if N < 2:
        return 0.0
    return float(np.sum(prob > 1)) / (N * (N - 1))
