import numpy as np
import torch

from .base import NodeDynamics, as_tensor, DTYPE
from .neuronal import Neuronal
from .sis import SIS
from .ecological import Ecological

all_dynamics = {cls.name: cls for cls in (Neuronal, SIS, Ecological)}

param_keys = {'neuronal':   ('tau', 'mu_loc'),
              'sis':        ('gamma',),
              'ecological': ('B', 'C', 'Kcap', 'D', 'E', 'H')}


def make_dynamics(name, device='cpu', **params) -> NodeDynamics:
    key = name.lower()
    if key not in all_dynamics:
        raise ValueError(f'unknown dynamics {name!r}, choose between {"|".join(all_dynamics)}')
    unknown = set(params) - set(param_keys[key])
    if unknown:
        raise ValueError(f'unknown parameter(s) for {key} dynamics: {", ".join(sorted(unknown))}')
    return all_dynamics[key](device=device, **params)


def _like(out:torch.Tensor, ref):
    if torch.is_tensor(ref):
        return out
    out = out.detach().cpu().numpy()
    return float(out) if out.ndim == 0 else out


##########################################################
def eval_f_g_g1(spec:NodeDynamics, x, y):
    xt, yt = as_tensor(x, spec.device), as_tensor(y, spec.device)
    if isinstance(spec, Ecological):
        spec.check_domain(xt, yt)
    return _like(spec.f(xt), x), _like(spec.g(xt, yt), x), _like(spec.g1(xt, yt), x)


def full_rhs(spec:NodeDynamics, W, x):
    weights = W.weights if hasattr(W, 'weights') else W
    weights = as_tensor(weights, spec.device)
    xt = as_tensor(x, spec.device)
    if xt.shape != (weights.shape[0],):
        raise ValueError(f'state has shape {tuple(xt.shape)}, expected ({weights.shape[0]},)')
    if not torch.all(torch.isfinite(xt)):
        raise ValueError('state contains non-finite values')
    return _like(spec.full_rhs(weights, xt), x)


def reduced_rhs(spec:NodeDynamics, R, X):
    Xt = as_tensor(X, spec.device)
    if Xt.shape != (R.n,):
        raise ValueError(f'reduced state has shape {tuple(Xt.shape)}, expected ({R.n},)')
    W_red = as_tensor(R.W_reduced, spec.device)
    mu    = as_tensor(R.mu, spec.device)
    return _like(spec.reduced_rhs(W_red, mu, Xt), X)


def project_observables(V, x):
    """X_nu = sum_i a_{nu i} x_i, node order canonical."""
    A = V.embedded()
    if torch.is_tensor(x):
        if x.shape[-1] != A.shape[1]:
            raise ValueError(f'state has length {x.shape[-1]}, reduction vectors cover {A.shape[1]} nodes')
        return x @ torch.as_tensor(A.T, dtype=x.dtype, device=x.device)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != A.shape[1]:
        raise ValueError(f'state has length {x.shape[-1]}, reduction vectors cover {A.shape[1]} nodes')
    return x @ A.T
