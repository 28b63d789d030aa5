import torch

from .base import NodeDynamics, DTYPE

LOW_STATE = 0.01  # zero is absorbing


class SIS(NodeDynamics):
    """Mean-field SIS, x_i is the infection probability of node i."""
    name = 'sis'

    def __init__(self, gamma=1.0, device='cpu'):
        if gamma < 0:
            raise ValueError(f'gamma must be non-negative, got {gamma}')
        super().__init__(device=device, gamma=float(gamma))
        self.gamma = float(gamma)

    def f(self, x):
        return -x

    def g(self, x, y):
        return self.gamma * (1 - x) * y

    def g1(self, x, y):
        return -self.gamma * y + 0 * x

    def clip(self, x):
        return torch.clamp(x, 0.0, 1.0)

    def low_state(self, size):
        return torch.full((size,), LOW_STATE, dtype=DTYPE, device=self.device)

    def coupling(self, weights, x):
        return self.gamma * (1 - x) * (weights @ x)
