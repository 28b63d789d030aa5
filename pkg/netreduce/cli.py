"""
netreduce command line: generate | reduce | sweep | refine | perturb | rmse
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .config import RunConfig, ConfigError, generators
from .graph import Partition, canonicalize, positify, block_decompose
from .netgen import SbmSpec, HetSpec, sbm_generate, het_generate, expected_sbm_matrix
from .reduction import reduce, gao_reduce, compatibility_residual
from .dynamics import make_dynamics
from .dynamics.base import as_tensor
from .integrate import integrate_to_equilibrium, write_trajectory
from .experiments import (SweepConfig, BifurcationDiagram, bifurcation_sweep, compare_diagrams,
                          refine_schedule, perturbation_experiment)
from .io_tools import (read_edgelist, read_matrix, write_edgelist, write_matrix, read_partition, write_partition,
                       write_reduction, write_json)

logger = logging.getLogger(__name__)

FAILED_SENTINEL = '_FAILED'
comparable_columns = ('X_reduced', 'X_exact', 'mean_K')


##########################################################
def load_network(cfg:RunConfig):
    """Network and partition described by the [network] and [partition] sections."""
    if cfg.is_randomized_network:
        cfg.require_seed('a random network')
    if cfg.network_source in generators:
        if cfg.network_source == 'sbm':
            spec = SbmSpec(sizes=cfg.sizes, densities=cfg.densities, weight=cfg.weight, seed=cfg.seed)
            W, P = expected_sbm_matrix(spec) if cfg.expected else sbm_generate(spec)
        else:
            W, P = het_generate(HetSpec(sizes=cfg.sizes, densities=cfg.densities, half_width=cfg.half_width,
                                        rho_inout=cfg.rho_inout, weight=cfg.weight, seed=cfg.seed))
        if cfg.partition_path is not None:
            P = read_partition(cfg.partition_path, W.n_nodes)
        return W, P

    W = read_edgelist(cfg.network_path) if cfg.network_source == 'edges' else read_matrix(cfg.network_path)
    if cfg.partition_path is not None:
        P = read_partition(cfg.partition_path, W.n_nodes)
    else:
        logger.info('no partition given, all nodes form a single group')
        P = Partition(np.zeros(W.n_nodes, dtype=np.int64))
    return W, P


def _sweep_config(cfg:RunConfig, show_progress=True):
    return SweepConfig(d_min=cfg.d_min, d_max=cfg.d_max, count=cfg.count, mode=cfg.mode,
                       dt=cfg.dt, tol=cfg.tol, t_max=cfg.t_max, show_progress=show_progress)


def _dynamics(cfg:RunConfig):
    return make_dynamics(cfg.dynamics_name, device=cfg.device, **cfg.dynamics_params)


##########################################################
def cmd_generate(cfg:RunConfig, args):
    W, P = load_network(cfg)
    write_edgelist(W, os.path.join(cfg.out, 'edges.csv'))
    write_partition(P, os.path.join(cfg.out, 'partition.csv'))
    if cfg.expected:
        write_matrix(W.weights, os.path.join(cfg.out, 'matrix.csv'))
    logger.info(f'generated {W.n_nodes} nodes, {int(np.count_nonzero(W.weights))} edges, {P.n_groups} groups')


def cmd_reduce(cfg:RunConfig, args):
    W, P = load_network(cfg)
    W = positify(W, cfg.epsilon)
    perm, Wc, Pc = canonicalize(W, P)
    methods = cfg.methods()
    for method in methods:
        out_dir = cfg.out if len(methods) == 1 else os.path.join(cfg.out, method)
        if method == 'gao':
            G = gao_reduce(W)
            os.makedirs(out_dir, exist_ok=True)
            write_json({'method': 'gao', 'beta_eff': G.beta_eff, 'out_weights': G.out_weights.tolist()},
                       os.path.join(out_dir, 'reduction.json'))
            logger.info(f'gao: beta_eff = {G.beta_eff:.6g}')
            continue
        vectors, R = reduce(Wc, Pc, method=method, mode=cfg.mode)
        residual = compatibility_residual(block_decompose(Wc, Pc), vectors, R)
        write_reduction(out_dir, vectors, R, Pc, perm, extra={'compatibility_residual': residual})
        logger.info(f'{vectors}')


def cmd_sweep(cfg:RunConfig, args):
    W, P = load_network(cfg)
    W = positify(W, cfg.epsilon)
    spec = _dynamics(cfg)
    sweep_cfg = _sweep_config(cfg)
    summary = {}
    for method in cfg.methods():
        diagram = bifurcation_sweep(W, P, spec, method=method, cfg=sweep_cfg)
        diagram.to_csv(os.path.join(cfg.out, f'diagram_{method}.csv'),
                       os.path.join(cfg.out, f'diagram_groups_{method}.csv'))
        summary[method] = diagram.rmse()
        logger.info(f'{method}: RMSE = {summary[method]["rmse"]:.6g}')
    write_json(summary, os.path.join(cfg.out, 'rmse.json'))

    if cfg.trajectory_stride:
        _, Wc, _ = canonicalize(W, P)
        weights = as_tensor(Wc.weights * cfg.d_max, spec.device)
        result = integrate_to_equilibrium(lambda x: spec.full_rhs(weights, x), spec.low_state(W.n_nodes),
                                          dt=cfg.dt, tol=cfg.tol, t_max=cfg.t_max, clip=spec.clip,
                                          stride=cfg.trajectory_stride, device=spec.device)
        write_trajectory(result, os.path.join(cfg.out, 'trajectory.csv'))


def cmd_refine(cfg:RunConfig, args):
    if not cfg.schedule:
        raise ConfigError([('refine.schedule', 'at least one (v_in, v_out) step is required')])
    W, P = load_network(cfg)
    steps = refine_schedule(W, P, cfg.schedule)
    counts = []
    for k, (Pk, (v_in, v_out)) in enumerate(zip(steps, cfg.schedule), start=1):
        write_partition(Pk, os.path.join(cfg.out, f'partition_step{k}.csv'))
        counts.append({'step': k, 'v_in': v_in, 'v_out': v_out, 'n_groups': int(Pk.n_groups)})
    write_json({'initial_groups': int(P.n_groups), 'steps': counts}, os.path.join(cfg.out, 'refine.json'))


def cmd_perturb(cfg:RunConfig, args):
    cfg.require_seed('the perturbation ensemble')
    if cfg.method == 'gao':
        raise ConfigError([('reduction.method', 'the degree-based reduction does not use a partition')])
    if not cfg.f_grid:
        raise ConfigError([('perturb.f_grid', 'at least one value is required')])
    methods = ('homogeneous', 'spectral') if cfg.method == 'all' else (cfg.method,)
    W, P = load_network(cfg)
    W = positify(W, cfg.epsilon)
    report = perturbation_experiment(W, P, _dynamics(cfg), cfg.f_grid, ensemble_size=cfg.ensemble_size,
                                     cfg=_sweep_config(cfg, show_progress=False), seed=cfg.seed,
                                     methods=methods, n_jobs=cfg.n_jobs, show_progress=True)
    write_json({'baseline_rmse': report.baseline, 'records': report.records},
               os.path.join(cfg.out, 'perturbation.json'))
    report.summary().to_csv(os.path.join(cfg.out, 'perturbation.csv'), index=False, float_format='%.17g')


def cmd_rmse(cfg:RunConfig, args):
    result = compare_diagrams(BifurcationDiagram.read_csv(args.diagrams[0]),
                              BifurcationDiagram.read_csv(args.diagrams[1]), column=args.column)
    result.update({'column': args.column, 'a': args.diagrams[0], 'b': args.diagrams[1]})
    write_json(result, os.path.join(cfg.out, 'rmse.json'))
    print(json.dumps(result, sort_keys=True))


dispatch_table = {'generate': cmd_generate, 'reduce': cmd_reduce, 'sweep': cmd_sweep,
                  'refine': cmd_refine, 'perturb': cmd_perturb, 'rmse': cmd_rmse}


##########################################################
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='INI run configuration')
    common.add_argument('--seed', type=int, default=None, help='unsigned 64-bit seed, mandatory for randomized steps')
    common.add_argument('--out', type=str, default=None, help='output directory')
    common.add_argument('--method', choices=('homogeneous', 'spectral', 'gao', 'all'), default=None)
    common.add_argument('--mode', choices=('restricted', 'optimal'), default=None)
    common.add_argument('--log-level', type=str, default='INFO')

    ap = argparse.ArgumentParser(prog='netreduce', description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest='command', required=True)
    sub.add_parser('generate', parents=[common], help='sample a network and write edges + partition')
    sub.add_parser('reduce',   parents=[common], help='reduction vectors, W_reduced and mu')
    sub.add_parser('sweep',    parents=[common], help='bifurcation diagrams of the full and reduced dynamics')
    sub.add_parser('refine',   parents=[common], help='degree-based partition refinement schedule')
    sub.add_parser('perturb',  parents=[common], help='RMSE under random partition perturbations')
    p_rmse = sub.add_parser('rmse', parents=[common], help='RMSE between two diagram CSVs')
    p_rmse.add_argument('diagrams', nargs=2, metavar='DIAGRAM_CSV')
    p_rmse.add_argument('--column', choices=comparable_columns, default='X_reduced')
    return ap


def dispatch(command, cfg:RunConfig, args):
    os.makedirs(cfg.out, exist_ok=True)
    sentinel = os.path.join(cfg.out, FAILED_SENTINEL)
    if os.path.exists(sentinel):
        os.remove(sentinel)
    cfg.write(os.path.join(cfg.out, 'config_effective.ini'))
    logger.debug(f'{cfg}')
    dispatch_table[command](cfg, args)
    return 0


def _report_failure(command, out_dir, error):
    record = {'status': 'failed', 'command': command, 'error': type(error).__name__, 'message': str(error)}
    if isinstance(error, ConfigError):
        record['keys'] = error.keys
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_json(record, os.path.join(out_dir, 'error.json'))
        open(os.path.join(out_dir, FAILED_SENTINEL), 'w').close()
    except OSError as e:
        logger.error(f'could not write the failure record to {out_dir}: {e}')
    return 2 if isinstance(error, ConfigError) else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO),
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    overrides = {'run.seed': args.seed, 'run.out': args.out,
                 'reduction.method': args.method, 'reduction.mode': args.mode}
    out_dir = args.out or 'out'
    try:
        cfg = RunConfig(args.config, overrides, require_network=args.command != 'rmse')
        out_dir = cfg.out
        return dispatch(args.command, cfg, args)
    except Exception as e:
        logger.error(f'{args.command} failed: {e}')
        logger.debug('traceback', exc_info=True)
        return _report_failure(args.command, out_dir, e)
