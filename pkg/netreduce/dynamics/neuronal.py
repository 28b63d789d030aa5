import torch

from .base import NodeDynamics


class Neuronal(NodeDynamics):
    """Hopfield-type firing-rate dynamics, g(x, y) = 1 / (1 + exp(-tau (y - mu_loc)))."""
    name = 'neuronal'

    def __init__(self, tau=0.3, mu_loc=10.0, device='cpu'):
        if tau <= 0:
            raise ValueError(f'tau must be positive, got {tau}')
        super().__init__(device=device, tau=float(tau), mu_loc=float(mu_loc))
        self.tau = float(tau)
        self.mu_loc = float(mu_loc)

    def f(self, x):
        return -x

    def g(self, x, y):
        return torch.sigmoid(self.tau * (y - self.mu_loc)) + 0 * x

    def g1(self, x, y):
        return torch.zeros_like(x + y)

    def coupling(self, weights, x):
        # g does not depend on the receiving node
        return weights @ torch.sigmoid(self.tau * (x - self.mu_loc))
