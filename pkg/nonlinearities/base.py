"""
Base class for bistable nonlinearities f with potential G(u) = int_u^M f.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np


class Nonlinearity(ABC):
    """
    Abstract odd bistable nonlinearity with wells at +-M.

    Subclasses provide f, f', G and an accurate evaluation of G close to
    the well. Instances are immutable after construction.
    """

    kind: str = "custom"

    def __init__(self, M: float):
        if not M > 0:
            raise ValueError(f"Well location M must be positive, got {M}")
        self._M = float(M)

    @property
    def M(self) -> float:
        return self._M

    @abstractmethod
    def f(self, u):
        """Nonlinearity f(u)."""

    @abstractmethod
    def fprime(self, u):
        """Derivative f'(u)."""

    @abstractmethod
    def G(self, u):
        """Potential G(u) = int_u^M f."""

    @abstractmethod
    def G_near_well(self, gap):
        """G(M - gap), accurate for small gap."""

    def well_curvature(self) -> float:
        """G''(M) = -f'(M); positive for a nondegenerate well."""
        return float(-self.fprime(self.M))

    def linearization_bound(self, samples: int = 4097) -> float:
        """Upper bound of f' on [-M, M] (sampled)."""
        u = np.linspace(-self.M, self.M, samples)
        return float(np.max(self.fprime(u)))

    def potential_curvature_bound(self, samples: int = 4097) -> float:
        """Upper bound of G'' = -f' on [0, M] (sampled)."""
        u = np.linspace(0.0, self.M, samples)
        return float(np.max(-self.fprime(u)))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "M": self.M}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(M={self.M})"
