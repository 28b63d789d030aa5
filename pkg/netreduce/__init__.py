from .graph import WeightedDigraph, Partition, BlockView, block_decompose, canonicalize, restore_order, positify, scale_weights
from .numerics import dominant_eigenpair, constrained_lsq, rayleigh_mu, ConvergenceError, SingularSystemError
from .reduction import (reduce, homogeneous_reduce, spectral_reduce, build_decoupled_matrices, reduction_error, gao_reduce,
                        compatibility_residual, ReductionVectors, ReducedSystem, GaoReduction, NegativeReductionVectorWarning)
from .dynamics import make_dynamics, eval_f_g_g1, full_rhs, reduced_rhs, project_observables, Neuronal, SIS, Ecological
from .integrate import integrate_to_equilibrium, write_trajectory, EquilibriumResult, DivergenceError
from .netgen import SbmSpec, HetSpec, sbm_generate, het_generate, expected_sbm_matrix
from .experiments import (SweepConfig, BifurcationDiagram, PerturbationReport, bifurcation_sweep, diagram_rmse, rmse_summary,
                          aggregate_reduced, refine_partition, refine_schedule, perturb_partition, perturbation_experiment,
                          optimal_vs_restricted)
from .config import RunConfig, ConfigError
