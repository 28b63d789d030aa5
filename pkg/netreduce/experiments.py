"""
evaluation protocols: bifurcation sweeps with continuation, RMSE between
diagrams, partition refinement and partition perturbation ensembles
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from tqdm import tqdm

from .graph import WeightedDigraph, Partition, canonicalize, scale_weights
from .numerics import dominant_eigenpair, constrained_lsq
from .reduction import ReducedSystem, reduce, gao_reduce, independent_basis
from .dynamics import NodeDynamics, project_observables
from .dynamics.base import as_tensor
from .integrate import integrate_to_equilibrium, DivergenceError, DT, TOL, T_MAX

logger = logging.getLogger(__name__)

all_methods = ('homogeneous', 'spectral', 'gao')

diagram_columns = ['d', 'mean_K', 'X_exact', 'X_reduced', 'branch', 'converged_exact', 'converged_reduced']
group_columns   = ['d', 'branch', 'group', 'X_exact', 'X_reduced']

ENSEMBLE_SIZE = 300


@dataclass
class SweepConfig:
    d_min: float = 0.0
    d_max: float = 1.0
    count: int = 30
    method: str = 'spectral'
    mode: str = 'restricted'
    dt: float = DT
    tol: float = TOL
    t_max: float = T_MAX
    show_progress: bool = False

    def __post_init__(self):
        if self.d_min < 0:
            raise ValueError(f'd_min must be non-negative, got {self.d_min}')
        if self.count < 2:
            raise ValueError(f'the d grid needs at least 2 points, got {self.count}')
        if self.d_max < self.d_min:
            raise ValueError(f'd_max ({self.d_max}) is smaller than d_min ({self.d_min})')

    def grid(self):
        return np.linspace(self.d_min, self.d_max, self.count)


@dataclass
class BifurcationDiagram:
    frame: pd.DataFrame                     # one row per (d, branch), diagram_columns
    groups: pd.DataFrame = None             # per-group observables, group_columns
    method: str = None

    def branch(self, name):
        return self.frame[self.frame['branch'] == name]

    def rmse(self):
        return rmse_summary(self)

    def to_csv(self, path, groups_path=None):
        self.frame.to_csv(path, index=False, float_format='%.17g')
        if groups_path is not None and self.groups is not None:
            self.groups.to_csv(groups_path, index=False, float_format='%.17g')

    @classmethod
    def read_csv(cls, path):
        frame = pd.read_csv(path)
        missing = set(diagram_columns) - set(frame.columns)
        if missing:
            raise ValueError(f'{path}: missing diagram column(s) {sorted(missing)}')
        return cls(frame=frame[diagram_columns])


@dataclass
class PerturbationReport:
    f_values: list
    rmse: dict = field(default_factory=dict)      # (f, method) -> list of member RMSEs (nan for failures)
    baseline: float = None                        # spectral RMSE of the original partition
    records: list = field(default_factory=list)

    def summary(self):
        return pd.DataFrame(self.records)


##########################################################
def aggregate_reduced(R:ReducedSystem, X):
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (R.n,):
        raise ValueError(f'reduced state has shape {X.shape}, expected ({R.n},)')
    sizes = np.asarray(R.sizes, dtype=np.float64)
    N = sizes.sum()
    return float(sizes @ X / N), float(sizes @ R.W_reduced.sum(axis=1) / N)


def _group_mean(sizes, X):
    sizes = np.asarray(sizes, dtype=np.float64)
    return float(sizes @ X / sizes.sum())


def _equilibrium(rhs, x0, spec:NodeDynamics, cfg:SweepConfig):
    try:
        return integrate_to_equilibrium(rhs, x0, dt=cfg.dt, tol=cfg.tol, t_max=cfg.t_max, clip=spec.clip, device=spec.device)
    except DivergenceError as e:
        logger.warning(f'integration diverged at step {e.step}')
        return None


def _sweep_reductions(Wc:WeightedDigraph, Pc:Partition, method, cfg:SweepConfig):
    """
    Reduction of scale_weights(Wc, d) for every grid point, computed once per d.
    d = 0 has no spectral reduction; it takes the vectors of the smallest positive
    grid point with zero couplings.
    """
    grid = cfg.grid()
    positive = grid[grid > 0]
    d_ref = float(positive.min()) if positive.size else 1.0
    cache = {}

    def reduction_at(d):
        d = float(d)
        if d not in cache:
            if d > 0:
                cache[d] = reduce(scale_weights(Wc, d), Pc, method=method, mode=cfg.mode)
            else:
                vectors, R = reduction_at(d_ref)
                cache[d] = (vectors, R.scaled(0.0))
        return cache[d]

    return reduction_at


def bifurcation_sweep(W:WeightedDigraph, P:Partition, spec:NodeDynamics, method=None, cfg:SweepConfig=None) -> BifurcationDiagram:
    """
    Forward branch from the low state at d_min, backward branch from the forward
    endpoint at d_max; every d starts from the previous equilibrium.
    """
    cfg = SweepConfig() if cfg is None else cfg
    method = cfg.method if method is None else method
    if method not in all_methods:
        raise ValueError(f'unknown method {method!r}, choose between {", ".join(all_methods)}')

    _, Wc, Pc = canonicalize(W, P)
    N = Wc.n_nodes
    if method == 'gao':
        G = gao_reduce(Wc)
        sizes = np.array([N])
        reducer = lambda d: np.array([[G.beta_eff * d]])
        observe = lambda x, d: np.array([G.out_weights @ x])
        reduced_rhs = lambda d: (lambda X: spec.scalar_rhs(G.beta_eff * d, X))
    else:
        reduction_at = _sweep_reductions(Wc, Pc, method, cfg)
        sizes = Pc.sizes
        reducer = lambda d: reduction_at(d)[1].W_reduced
        observe = lambda x, d: project_observables(reduction_at(d)[0], x)

        def reduced_rhs(d):
            R = reduction_at(d)[1]
            W_red, mu = as_tensor(R.W_reduced, spec.device), as_tensor(R.mu, spec.device)
            return lambda X: spec.reduced_rhs(W_red, mu, X)

    n = sizes.size
    rows, group_rows = [], []
    x, X = spec.low_state(N), spec.low_state(n)
    for branch, grid in (('forward', cfg.grid()), ('backward', cfg.grid()[::-1])):
        for d in tqdm(grid, desc=f'{method} {branch} sweep', disable=not cfg.show_progress):
            weights = as_tensor(scale_weights(Wc, d).weights, spec.device)
            W_red = reducer(d)
            mean_K = _group_mean(sizes, W_red.sum(axis=1))

            full = _equilibrium(lambda z: spec.full_rhs(weights, z), x, spec, cfg)
            red  = _equilibrium(reduced_rhs(d), X, spec, cfg)

            X_exact_g = observe(full.state, d) if full is not None else np.full(n, np.nan)
            X_red_g   = red.state if red is not None else np.full(n, np.nan)
            rows.append([float(d), mean_K, _group_mean(sizes, X_exact_g), _group_mean(sizes, X_red_g), branch,
                         bool(full is not None and full.converged), bool(red is not None and red.converged)])
            for nu in range(n):
                group_rows.append([float(d), branch, nu, float(X_exact_g[nu]), float(X_red_g[nu])])
            if full is not None:
                x = full.state
            if red is not None:
                X = red.state

    return BifurcationDiagram(frame=pd.DataFrame(rows, columns=diagram_columns),
                              groups=pd.DataFrame(group_rows, columns=group_columns), method=method)


def diagram_rmse(exact_curve, reduced_curve, valid=None) -> float:
    exact_curve = np.asarray(exact_curve, dtype=np.float64)
    reduced_curve = np.asarray(reduced_curve, dtype=np.float64)
    if exact_curve.shape != reduced_curve.shape:
        raise ValueError(f'curves do not share a grid: {exact_curve.shape} vs {reduced_curve.shape}')
    mask = np.isfinite(exact_curve) & np.isfinite(reduced_curve)
    if valid is not None:
        mask &= np.asarray(valid, dtype=bool)
    if not mask.any():
        return float('nan')
    return float(np.sqrt(np.mean((exact_curve[mask] - reduced_curve[mask])**2)))


def rmse_summary(diagram:BifurcationDiagram):
    """RMSE over both branches; non-converged points are excluded pairwise."""
    fr = diagram.frame
    valid = fr['converged_exact'].astype(bool) & fr['converged_reduced'].astype(bool)
    value = diagram_rmse(fr['X_exact'], fr['X_reduced'], valid)
    n_excluded = int((~valid).sum())
    if n_excluded:
        logger.info(f'RMSE: {n_excluded} non-converged point(s) excluded')
    return {'rmse': value, 'n_points': int(valid.sum()), 'n_excluded': n_excluded}


def compare_diagrams(a:BifurcationDiagram, b:BifurcationDiagram, column='X_reduced'):
    """RMSE between one column of two diagrams matched on (d, branch)."""
    merged = a.frame.merge(b.frame, on=['d', 'branch'], suffixes=('_a', '_b'))
    if merged.empty:
        raise ValueError('diagrams share no (d, branch) point')
    valid = merged[f'converged_exact_a'].astype(bool) & merged[f'converged_reduced_a'].astype(bool) & \
            merged[f'converged_exact_b'].astype(bool) & merged[f'converged_reduced_b'].astype(bool)
    return {'rmse': diagram_rmse(merged[f'{column}_a'], merged[f'{column}_b'], valid),
            'n_points': int(valid.sum()), 'n_excluded': int((~valid).sum())}


##########################################################
def _categorize(values, v):
    """Greedy segmentation of sorted values into categories of spread <= v."""
    labels = np.zeros(values.size, dtype=np.int64)
    order = np.argsort(values, kind='stable')
    cat, start = 0, values[order[0]]
    for idx in order:
        if values[idx] - start > v:
            cat += 1
            start = values[idx]
        labels[idx] = cat
    return labels


def refine_partition(W:WeightedDigraph, P:Partition, v_in, v_out) -> Partition:
    if v_in <= 0 or v_out <= 0:
        raise ValueError(f'v_in and v_out must be positive, got {v_in}, {v_out}')
    if P.n_nodes != W.n_nodes:
        raise ValueError(f'partition covers {P.n_nodes} nodes but the network has {W.n_nodes}')
    onehot = np.eye(P.n_groups)[P.assignment]
    k_in  = W.weights @ onehot        # k_in[i, rho]: weight from G_rho into i
    k_out = W.weights.T @ onehot      # k_out[i, rho]: weight from i into G_rho

    assignment = np.empty(P.n_nodes, dtype=np.int64)
    next_group = 0
    for nodes in P.groups():
        keys = np.column_stack([_categorize(k_in[nodes, rho], v_in) for rho in range(P.n_groups)] +
                               [_categorize(k_out[nodes, rho], v_out) for rho in range(P.n_groups)])
        _, sub = np.unique(keys, axis=0, return_inverse=True)
        sub = sub.ravel()
        assignment[nodes] = next_group + sub
        next_group += sub.max() + 1
    refined = Partition(assignment)
    logger.info(f'refine_partition(v_in={v_in:g}, v_out={v_out:g}): {P.n_groups} -> {refined.n_groups} groups')
    return refined


def refine_schedule(W:WeightedDigraph, P:Partition, schedule):
    """Nested refinements, each (v_in, v_out) step applied to the previous output."""
    out = []
    for v_in, v_out in schedule:
        P = refine_partition(W, P, v_in, v_out)
        out.append(P)
    return out


def perturb_partition(P:Partition, f, rng) -> Partition:
    """floor(f N) swaps of the memberships of two nodes drawn from different groups."""
    if not 0 <= f <= 1:
        raise ValueError(f'f must lie in [0, 1], got {f}')
    if P.n_groups < 2:
        raise ValueError('perturbation needs at least two groups')
    N = P.n_nodes
    assignment = P.assignment.copy()
    for _ in range(int(np.floor(f * N))):
        while True:
            a, b = rng.integers(N, size=2)
            if assignment[a] != assignment[b]:
                break
        assignment[a], assignment[b] = assignment[b], assignment[a]
    return Partition(assignment, labels=P.labels)


def perturbation_experiment(W:WeightedDigraph, P0:Partition, spec:NodeDynamics, f_grid, ensemble_size=ENSEMBLE_SIZE,
                            cfg:SweepConfig=None, seed=0, methods=('homogeneous', 'spectral'), n_jobs=1, show_progress=False) -> PerturbationReport:
    cfg = SweepConfig() if cfg is None else cfg

    def run_member(P):
        return {m: rmse_summary(bifurcation_sweep(W, P, spec, method=m, cfg=cfg))['rmse'] for m in methods}

    base = run_member(P0)
    baseline = base.get('spectral', next(iter(base.values())))
    if not baseline > 0:
        logger.warning(f'baseline RMSE is {baseline}, relative errors are undefined')

    report = PerturbationReport(f_values=list(f_grid), baseline=baseline)
    for fi, f in enumerate(f_grid):
        if f == 0:
            results, failed = [base], 0
        else:
            def member(k, f=f, fi=fi):
                rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(fi, k)))
                try:
                    return run_member(perturb_partition(P0, f, rng))
                except Exception as e:
                    logger.warning(f'f={f:g} member {k} failed: {e}')
                    return None

            with ThreadPoolExecutor(max_workers=max(1, n_jobs)) as pool:
                out = list(tqdm(pool.map(member, range(ensemble_size)), total=ensemble_size,
                                desc=f'f = {f:g}', disable=not show_progress))
            results = [r for r in out if r is not None]
            failed = len(out) - len(results)

        for m in methods:
            values = np.array([r[m] for r in results], dtype=np.float64)
            report.rmse[(float(f), m)] = values.tolist()
            rel = values / baseline
            rel = rel[np.isfinite(rel)]
            report.records.append({'f': float(f), 'method': m,
                                   'mean_rel_rmse': float(np.mean(rel)) if rel.size else float('nan'),
                                   'std_rel_rmse': float(np.std(rel)) if rel.size else float('nan'),
                                   'n_members': int(len(results)), 'n_failed': int(failed)})
    return report


##########################################################
def optimal_vs_restricted(n, m, rng):
    """
    One random instance of n matrices m x m, entries of matrix i uniform in (0, 1 + 5 i).
    Returns (restricted error, optimal error, distance between the two solutions).
    """
    matrices = [rng.uniform(0, 1 + 5 * i, size=(m, m)) + np.finfo(float).tiny for i in range(1, n + 1)]
    eigs = [dominant_eigenpair(M) for M in matrices]
    lambdas = [e.value for e in eigs]
    optimal = constrained_lsq(matrices, lambdas, list(np.eye(m)))
    restricted = constrained_lsq(matrices, lambdas, independent_basis([e.vector for e in eigs]))
    return restricted.error, optimal.error, float(np.linalg.norm(restricted.vector - optimal.vector))
