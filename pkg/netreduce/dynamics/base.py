import logging

import numpy as np
import torch

logger = logging.getLogger(__name__)

DTYPE = torch.float64


def as_tensor(x, device='cpu'):
    return torch.as_tensor(np.asarray(x, dtype=np.float64) if not torch.is_tensor(x) else x, dtype=DTYPE, device=device)


class NodeDynamics():
    """
    Node dynamics dx_i/dt = f(x_i) + sum_j w_ij g(x_i, x_j).
    Subclasses implement f, g and g1 = dg/dx on tensors (element-wise, broadcasting).
    """
    name   = None
    params = {}
    device = 'cpu'

    def __init__(self, device='cpu', **params):
        self.device = device
        self.params = dict(params)

    def __str__(self):
        s = f"\n{self.__class__.__module__}.{self.__class__.__qualname__}:\n"
        s += f"  Dynamics: {self.name}\n"
        s += f"  Parameters: {self.params}\n"
        return s

    def __repr__(self):
        args = ', '.join(f'{k}={v!r}' for k, v in self.params.items())
        return f'{self.__class__.__name__}({args})'

    ##########################################################
    def f(self, x:torch.Tensor):
        raise NotImplementedError

    def g(self, x:torch.Tensor, y:torch.Tensor):
        raise NotImplementedError

    def g1(self, x:torch.Tensor, y:torch.Tensor):
        raise NotImplementedError

    def clip(self, x:torch.Tensor):
        return x

    def low_state(self, size):
        """Initial condition of the forward branch of a sweep."""
        return torch.zeros(size, dtype=DTYPE, device=self.device)

    def coupling(self, weights:torch.Tensor, x:torch.Tensor):
        # sum_j w_ij g(x_i, x_j), generic outer evaluation
        return torch.sum(weights * self.g(x[:, None], x[None, :]), dim=1)

    ##########################################################
    def full_rhs(self, weights:torch.Tensor, x:torch.Tensor):
        return self.f(x) + self.coupling(weights, x)

    def reduced_rhs(self, W_reduced:torch.Tensor, mu:torch.Tensor, X:torch.Tensor):
        Xi, Xj = X[:, None], X[None, :]
        correction = torch.sum((mu - W_reduced) * self.g1(Xi, Xj), dim=1) * X
        return self.f(X) + torch.sum(W_reduced * self.g(Xi, Xj), dim=1) + correction

    def scalar_rhs(self, beta, x:torch.Tensor):
        """Degree-based 1-dimensional dynamics dx/dt = f(x) + beta g(x, x)."""
        return self.f(x) + beta * self.g(x, x)
