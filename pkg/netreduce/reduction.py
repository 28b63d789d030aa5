"""
homogeneous and spectral reductions of a network onto n group observables,
plus the degree-based 1-dimensional baseline
"""

import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .graph import WeightedDigraph, Partition, BlockView, block_decompose
from .numerics import dominant_eigenpair, constrained_lsq, rayleigh_mu, SingularSystemError

logger = logging.getLogger(__name__)

HOMOGENEOUS = 'homogeneous'
SPECTRAL_RESTRICTED = 'spectral-restricted'
SPECTRAL_OPTIMAL = 'spectral-optimal'

all_modes = ('restricted', 'optimal')

DEDUP_TOL = 1e-10


class NegativeReductionVectorWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ReductionVectors:
    partials: tuple            # a_hat_nu, length m_nu each
    method: str
    per_group_error: tuple = None

    @property
    def n(self):
        return len(self.partials)

    @property
    def sizes(self):
        return np.array([a.size for a in self.partials])

    def embedded(self):
        """n x N matrix whose row nu is a_nu (zeros outside G_nu), canonical node order."""
        sizes = self.sizes
        A = np.zeros((self.n, sizes.sum()))
        start = 0
        for nu, a in enumerate(self.partials):
            A[nu, start:start + a.size] = a
            start += a.size
        return A

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  Method: {self.method}\n"
        s += f"  Groups: {self.n}, sizes {self.sizes.tolist()}\n"
        if self.per_group_error is not None:
            s += f"  Per-group error: {[float(f'{e:.3e}') for e in self.per_group_error]}\n"
        return s


@dataclass(frozen=True)
class ReducedSystem:
    W_reduced: np.ndarray
    mu: np.ndarray
    lam: np.ndarray            # lambda_{nu rho}, diagnostic
    sizes: np.ndarray
    source: ReductionVectors = None

    @property
    def n(self):
        return self.W_reduced.shape[0]

    def scaled(self, d):
        """Same reduction vectors applied to scale_weights(W, d); the couplings are linear in d."""
        return replace(self, W_reduced=self.W_reduced * d, mu=self.mu * d, lam=self.lam * d)

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  n = {self.n}\n"
        s += f"  W_reduced =\n{np.array2string(self.W_reduced, precision=4)}\n"
        s += f"  mu =\n{np.array2string(self.mu, precision=4)}\n"
        return s


@dataclass(frozen=True)
class GaoReduction:
    beta_eff: float
    out_weights: np.ndarray


##########################################################
def _reduced_system(B:BlockView, vectors:ReductionVectors, use_mu=True) -> ReducedSystem:
    n = B.n_groups
    a = vectors.partials
    W_red = np.zeros((n, n))
    mu    = np.zeros((n, n))
    lam   = np.zeros((n, n))
    for nu in range(n):
        for rho in range(n):
            k = B.degree_blocks[nu][rho]
            W_red[nu, rho] = a[nu] @ k
            mu[nu, rho]    = rayleigh_mu(k, a[nu]) if use_mu else W_red[nu, rho]
            lam[nu, rho]   = (a[rho] @ (B.blocks[nu][rho].T @ a[nu])) / (a[rho] @ a[rho])
    return ReducedSystem(W_reduced=W_red, mu=mu, lam=lam, sizes=np.asarray(B.sizes), source=vectors)


def homogeneous_reduce(W:WeightedDigraph, P:Partition):
    B = block_decompose(W, P)
    partials = tuple(np.full(m, 1.0 / m) for m in P.sizes)
    vectors = ReductionVectors(partials=partials, method=HOMOGENEOUS)
    return vectors, _reduced_system(B, vectors, use_mu=False)


def build_decoupled_matrices(B:BlockView, nu):
    """
    W'_{nu nu} = W_{nu nu}^T and W'_{nu rho} = W_{rho nu}^T W_{nu rho}^T for rho != nu,
    all m_nu x m_nu. Index rho of the returned list is the target group.
    """
    if not 0 <= nu < B.n_groups:
        raise ValueError(f'group index {nu} out of range for {B.n_groups} groups')
    matrices = []
    for rho in range(B.n_groups):
        if not (np.all(B.blocks[nu][rho] > 0) and np.all(B.blocks[rho][nu] > 0)):
            raise ValueError(f'block ({nu},{rho}) or ({rho},{nu}) is not strictly positive, apply positify first')
        if rho == nu:
            matrices.append(B.blocks[nu][nu].T.copy())
        else:
            matrices.append(B.blocks[rho][nu].T @ B.blocks[nu][rho].T)
    return matrices


def reduction_error(a_hat, matrices, lambdas) -> float:
    a_hat = np.asarray(a_hat, dtype=np.float64)
    return float(sum(np.sum((M @ a_hat - lam * a_hat)**2) for M, lam in zip(matrices, lambdas)))


def independent_basis(vectors):
    kept = []
    for v in vectors:
        if kept:
            U = np.column_stack(kept)
            coef = np.linalg.lstsq(U, v, rcond=None)[0]
            if np.linalg.norm(v - U @ coef) < DEDUP_TOL * max(np.linalg.norm(v), 1.0):
                continue
        kept.append(v)
    return kept


def _spectral_group(B:BlockView, nu, mode):
    m = B.sizes[nu]
    if m == 1:
        return np.ones(1), 0.0

    matrices = build_decoupled_matrices(B, nu)
    eigs = [dominant_eigenpair(M, fallback=True) for M in matrices]
    lambdas = [e.value for e in eigs]
    if mode == 'optimal':
        basis = list(np.eye(m))
    else:
        basis = independent_basis([e.vector for e in eigs])
        if len(basis) < len(eigs):
            logger.debug(f'group {nu}: {len(eigs) - len(basis)} repeated dominant eigenvector(s) dropped from the basis')
    if len(basis) == 0:
        raise SingularSystemError(f'group {nu}: empty basis after deduplication')

    sol = constrained_lsq(matrices, lambdas, basis)
    a_hat = sol.vector
    # the solution sums to one up to rounding
    a_hat = a_hat / a_hat.sum()
    return a_hat, reduction_error(a_hat, matrices, lambdas)


def spectral_reduce(W:WeightedDigraph, P:Partition, mode='restricted'):
    if mode not in all_modes:
        raise ValueError(f'unknown mode {mode!r}, choose between {", ".join(all_modes)}')
    if not W.is_positive:
        raise ValueError('spectral reduction needs a strictly positive matrix, apply positify first')

    B = block_decompose(W, P)
    partials, errors = [], []
    for nu in range(P.n_groups):
        a_hat, err = _spectral_group(B, nu, mode)
        if np.any(a_hat < 0):
            msg = f'group {nu}: reduction vector has {int(np.sum(a_hat < 0))} negative component(s) (min {a_hat.min():.3e})'
            logger.warning(msg)
            warnings.warn(msg, NegativeReductionVectorWarning, stacklevel=2)
        partials.append(a_hat)
        errors.append(err)

    method = SPECTRAL_OPTIMAL if mode == 'optimal' else SPECTRAL_RESTRICTED
    vectors = ReductionVectors(partials=tuple(partials), method=method, per_group_error=tuple(errors))
    return vectors, _reduced_system(B, vectors)


def reduce(W:WeightedDigraph, P:Partition, method='spectral', mode='restricted'):
    if method == HOMOGENEOUS:
        return homogeneous_reduce(W, P)
    if method == 'spectral':
        return spectral_reduce(W, P, mode=mode)
    raise ValueError(f'unknown reduction method {method!r}')


def compatibility_residual(B:BlockView, vectors:ReductionVectors, R:ReducedSystem) -> float:
    """max over (nu, rho) of ||W_{nu rho}^T a_nu - lambda_{nu rho} a_rho||."""
    a = vectors.partials
    res = 0.0
    for nu in range(B.n_groups):
        for rho in range(B.n_groups):
            r = B.blocks[nu][rho].T @ a[nu] - R.lam[nu, rho] * a[rho]
            res = max(res, float(np.linalg.norm(r)))
    return res


def gao_reduce(W:WeightedDigraph) -> GaoReduction:
    s_out = W.out_degrees()
    s_in  = W.in_degrees()
    total = s_out.sum()
    if total <= 0:
        raise ValueError('degree-based reduction needs at least one positive out-degree')
    return GaoReduction(beta_eff=float(s_out @ s_in / total), out_weights=s_out / total)
