"""
numerical kernels of the spectral reduction: dominant eigenpairs of positive
matrices and the sum-constrained least-squares problem
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)

EIG_TOL      = 1e-12
EIG_MAX_ITER = 100_000
PIVOT_TOL    = 1e-13


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    history: tuple = ()


@dataclass(frozen=True)
class LsqSolution:
    coefficients: np.ndarray
    multiplier: float
    error: float
    basis_dim: int
    vector: np.ndarray = None  # a(x) = sum_s x_s u_s


##########################################################
def dominant_eigenpair(M, tol=EIG_TOL, max_iter=EIG_MAX_ITER, keep_history=False, fallback=False) -> EigenPair:
    """
    Power iteration with sum-1 renormalisation, started from the uniform vector.
    Stops when ||M v - lambda v||_inf < tol * max(1, |lambda|).
    With fallback=True a non-converging iteration (nearly reducible M, tied
    eigenvalues) is finished by a dense eigendecomposition instead of raising.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f'matrix must be square, got shape {M.shape}')
    if tol <= 0:
        raise ValueError(f'tolerance must be positive, got {tol}')
    if not np.all(M > 0):
        raise ValueError('dominant_eigenpair expects a strictly positive matrix')

    m = M.shape[0]
    v = np.full(m, 1.0 / m)
    history = []
    residual = np.inf
    for it in range(int(max_iter) + 1):
        w   = M @ v
        lam = w.sum()  # v sums to 1
        residual = np.max(np.abs(w - lam * v))
        if keep_history:
            history.append(residual)
        if residual < tol * max(1.0, abs(lam)):
            return EigenPair(value=float(lam), vector=v, residual=float(residual), iterations=it, history=tuple(history))
        v = w / lam

    if fallback:
        logger.warning(f'power iteration stalled after {max_iter} iterations (residual {residual:.3e}), '
                       f'using a dense eigendecomposition')
        return _perron_by_eig(M, max_iter, tuple(history))
    raise ConvergenceError(f'power iteration did not converge in {max_iter} iterations (residual {residual:.3e})',
                           residual=float(residual), iterations=int(max_iter))


def _perron_by_eig(M, iterations, history=()):
    values, vectors = linalg.eig(M)
    k = int(np.argmax(values.real))
    v = np.abs(vectors[:, k].real)
    v = v / v.sum()
    lam = float((M @ v).sum())
    residual = float(np.max(np.abs(M @ v - lam * v)))
    return EigenPair(value=lam, vector=v, residual=residual, iterations=iterations, history=history)


def constrained_lsq(matrices, lambdas, basis) -> LsqSolution:
    """
    Minimise E(a) = sum_j ||M_j a - lambda_j a||^2 over a = sum_s x_s u_s with sum_s x_s = 1.
    The Lagrange conditions C x = K 1, 1^T x = 1 are solved through the bordered matrix
        | C   -1 |
        | 1^T  0 |
    and the error of the solution equals the multiplier K.
    """
    matrices = [np.asarray(M, dtype=np.float64) for M in matrices]
    if len(matrices) == 0 or len(matrices) != len(lambdas):
        raise ValueError(f'{len(matrices)} matrices given for {len(lambdas)} eigenvalues')
    m = matrices[0].shape[0]
    if any(M.shape != (m, m) for M in matrices):
        raise ValueError('all matrices must be square with the same dimension')
    U = np.column_stack([np.asarray(u, dtype=np.float64) for u in basis])
    if U.shape[0] != m:
        raise ValueError(f'basis vectors have length {U.shape[0]}, matrices have dimension {m}')
    r = U.shape[1]
    if r > m:
        raise ValueError(f'basis has {r} vectors in a space of dimension {m}')

    C = np.zeros((r, r))
    for M, lam in zip(matrices, lambdas):
        D = M @ U - lam * U
        C += D.T @ D

    C_hat = np.zeros((r + 1, r + 1))
    C_hat[:r, :r] = C
    C_hat[:r, r]  = -1.0
    C_hat[r, :r]  = 1.0
    rhs = np.zeros(r + 1)
    rhs[r] = 1.0

    y = _solve_bordered(C_hat, rhs)
    x, K = y[:r], float(y[r])
    error = float(x @ C @ x)
    return LsqSolution(coefficients=x, multiplier=K, error=max(error, 0.0), basis_dim=r, vector=U @ x)


def _solve_bordered(C_hat, rhs):
    scale = max(np.max(np.abs(C_hat)), 1.0)
    lu, piv = linalg.lu_factor(C_hat, check_finite=True)
    if np.min(np.abs(np.diag(lu))) > PIVOT_TOL * scale:
        return linalg.lu_solve((lu, piv), rhs)

    # repeated structure in the basis: any minimiser has the same error
    logger.warning('bordered system is singular to pivot tolerance, solving in the least-squares sense')
    y = linalg.lstsq(C_hat, rhs)[0]
    if abs(y[:-1].sum() - 1.0) > 1e-8:
        raise SingularSystemError('degenerate basis: the sum constraint cannot be satisfied')
    return y


def rayleigh_mu(degree_diag, a_hat) -> float:
    """Scalar mu minimising ||K a - mu a||^2 for K = diag(degree_diag)."""
    degree_diag = np.asarray(degree_diag, dtype=np.float64)
    a_hat = np.asarray(a_hat, dtype=np.float64)
    if degree_diag.shape != a_hat.shape:
        raise ValueError(f'shape mismatch: {degree_diag.shape} vs {a_hat.shape}')
    norm2 = a_hat @ a_hat
    if norm2 == 0:
        raise ValueError('a_hat must be non-zero')
    return float((a_hat * degree_diag) @ a_hat / norm2)
