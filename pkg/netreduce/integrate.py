"""
fixed-step RK4 integration towards equilibrium
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
import torch

from .dynamics.base import DTYPE

logger = logging.getLogger(__name__)

DT    = 0.01
TOL   = 1e-8
T_MAX = 2000.0


class DivergenceError(FloatingPointError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


@dataclass
class EquilibriumResult:
    state: np.ndarray
    converged: bool
    residual: float
    elapsed_time: float
    steps: int
    trajectory: pd.DataFrame = None


##########################################################
def integrate_to_equilibrium(rhs, x0, dt=DT, tol=TOL, t_max=T_MAX, clip=None, stride=None, device='cpu') -> EquilibriumResult:
    """
    rhs:    callable taking and returning a float64 tensor
    clip:   optional projection applied after every step (e.g. SIS states onto [0, 1])
    stride: record the state every `stride` steps into `trajectory`
    """
    if dt <= 0 or tol <= 0:
        raise ValueError(f'dt and tol must be positive, got dt={dt}, tol={tol}')
    if t_max <= dt:
        raise ValueError(f't_max must exceed dt, got t_max={t_max}, dt={dt}')

    x = torch.as_tensor(np.asarray(x0, dtype=np.float64) if not torch.is_tensor(x0) else x0, dtype=DTYPE, device=device).clone()
    if clip is not None:
        x = clip(x)
    max_steps = int(np.floor(t_max / dt + 1e-9))
    rows = []

    step = 0
    converged = False
    residual = np.inf
    while True:
        k1 = rhs(x)
        residual = float(torch.max(torch.abs(k1))) if k1.numel() else 0.0
        if stride and step % stride == 0:
            rows.append([step * dt] + x.tolist())
        if not np.isfinite(residual):
            raise DivergenceError(f'non-finite derivative at step {step}', step=step)
        if residual < tol:
            converged = True
            break
        if step >= max_steps:
            break
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if clip is not None:
            x = clip(x)
        step += 1
        if not torch.all(torch.isfinite(x)):
            raise DivergenceError(f'non-finite state at step {step}', step=step)

    if not converged:
        logger.debug(f'no equilibrium after t = {step * dt:g} (residual {residual:.3e})')
    trajectory = None
    if stride:
        trajectory = pd.DataFrame(rows, columns=['t'] + [f'x_{i+1}' for i in range(x.numel())])
    return EquilibriumResult(state=x.detach().cpu().numpy(), converged=converged, residual=residual,
                             elapsed_time=step * dt, steps=step, trajectory=trajectory)


def write_trajectory(result:EquilibriumResult, path):
    if result.trajectory is None:
        raise ValueError('no trajectory recorded, integrate with stride > 0')
    result.trajectory.to_csv(path, index=False, float_format='%.17g')
