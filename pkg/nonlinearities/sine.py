import numpy as np

from nonlinearities.base import Nonlinearity


class SineNonlinearity(Nonlinearity):
    """f(u) = sin(pi u), G(u) = (1 + cos(pi u)) / pi, wells at +-1."""

    kind = "sine"

    def __init__(self):
        super().__init__(1.0)

    def f(self, u):
        u = np.asarray(u, dtype=float)
        # exact zeros at the integers, where sin(pi u) only rounds to ~1e-16
        return np.where(u == np.round(u), 0.0, np.sin(np.pi * u))

    def fprime(self, u):
        return np.pi * np.cos(np.pi * np.asarray(u, dtype=float))

    def G(self, u):
        return (1.0 + np.cos(np.pi * np.asarray(u, dtype=float))) / np.pi

    def G_near_well(self, gap):
        return (2.0 / np.pi) * np.sin(0.5 * np.pi * np.asarray(gap, dtype=float)) ** 2
