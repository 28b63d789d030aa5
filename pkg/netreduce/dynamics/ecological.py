import torch

from .base import NodeDynamics

DENOMINATOR_FLOOR = 1e-300


class Ecological(NodeDynamics):
    """
    Mutualistic species abundances:
        f(x)    = B + x (1 - x/Kcap) (x/C - 1)
        g(x, y) = x y / (D + E x + H y)
    """
    name = 'ecological'

    def __init__(self, B=0.1, C=1.0, Kcap=5.0, D=6.0, E=0.9, H=0.1, device='cpu'):
        bad = []
        if C <= 0:
            bad.append('C')
        if Kcap <= 0:
            bad.append('Kcap')
        if D <= 0:
            bad.append('D')
        if E < 0:
            bad.append('E')
        if H < 0:
            bad.append('H')
        if bad:
            raise ValueError(f'invalid ecological parameter(s): {", ".join(bad)} (need C, Kcap, D > 0 and E, H >= 0)')
        super().__init__(device=device, B=float(B), C=float(C), Kcap=float(Kcap), D=float(D), E=float(E), H=float(H))
        self.B, self.C, self.Kcap = float(B), float(C), float(Kcap)
        self.D, self.E, self.H = float(D), float(E), float(H)

    def _denominator(self, x, y):
        return self.D + self.E * x + self.H * y

    def f(self, x):
        return self.B + x * (1 - x / self.Kcap) * (x / self.C - 1)

    def g(self, x, y):
        return x * y / self._denominator(x, y)

    def g1(self, x, y):
        den = self._denominator(x, y)
        return y * (self.D + self.H * y) / den**2

    def clip(self, x):
        return torch.clamp(x, min=0.0)

    def check_domain(self, x, y):
        den = self._denominator(torch.as_tensor(x), torch.as_tensor(y))
        if torch.any(den.abs() < DENOMINATOR_FLOOR) or torch.any(den <= 0):
            raise FloatingPointError('ecological coupling denominator D + E x + H y underflows')
