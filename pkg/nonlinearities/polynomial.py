"""
Odd polynomial nonlinearities, with the potential obtained by exact
antidifferentiation.
"""
from typing import Any, Dict, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from nonlinearities.base import Nonlinearity


class PolynomialNonlinearity(Nonlinearity):
    """
    f(u) = c1 u + c3 u^3 + c5 u^5 + ...

    Args:
        coeffs: Coefficients of the odd powers, lowest first
        M: Well location
        kind: Label reported in summaries
    """

    def __init__(self, coeffs: Sequence[float], M: float = 1.0, kind: str = "custom"):
        super().__init__(M)
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs or not any(coeffs):
            raise ValueError("Polynomial nonlinearity needs at least one nonzero odd coefficient")
        self.kind = kind
        self.coeffs = coeffs

        full = np.zeros(2 * len(coeffs))
        full[1::2] = coeffs
        self._f = Polynomial(full)
        self._fprime = self._f.deriv()
        antiderivative = self._f.integ()
        self._G = Polynomial([antiderivative(self.M)]) - antiderivative

        # re-expand about the well so that G(M - g) keeps full relative precision
        near_well = self._G(Polynomial([self.M, -1.0]))
        near = near_well.coef.copy()
        near[0] = 0.0
        if near.size > 1 and abs(near[1]) <= 1e-12 * max(1.0, np.max(np.abs(near))):
            near[1] = 0.0
        self._G_well = Polynomial(near)

    def f(self, u):
        return self._f(u)

    def fprime(self, u):
        return self._fprime(u)

    def G(self, u):
        return self._G(u)

    def G_near_well(self, gap):
        return self._G_well(gap)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "M": self.M, "coeffs": list(self.coeffs)}

    def __repr__(self) -> str:
        return f"PolynomialNonlinearity(coeffs={self.coeffs}, M={self.M}, kind={self.kind!r})"


def allen_cahn() -> PolynomialNonlinearity:
    """f(u) = u - u^3, G(u) = (1 - u^2)^2 / 4."""
    return PolynomialNonlinearity((1.0, -1.0), M=1.0, kind="allen_cahn")
