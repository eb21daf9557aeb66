"""
Nonlinearity factory for built-in and custom bistable f.
"""
from typing import Sequence

from nonlinearities.base import Nonlinearity
from nonlinearities.hypotheses import HypothesisReport, check_hypotheses
from nonlinearities.polynomial import PolynomialNonlinearity, allen_cahn
from nonlinearities.sine import SineNonlinearity


def make_builtin(kind: str) -> Nonlinearity:
    """
    Factory function for the built-in nonlinearities.

    Args:
        kind: 'allen_cahn' or 'sine'

    Returns:
        Nonlinearity instance

    Raises:
        ValueError: If kind is not a built-in
    """
    builtins = {
        'allen_cahn': allen_cahn,
        'allen-cahn': allen_cahn,  # Alternative naming
        'sine': SineNonlinearity,
    }

    factory = builtins.get(kind.lower())

    if not factory:
        raise ValueError(
            f"Unsupported nonlinearity: {kind}. "
            f"Supported nonlinearities: {', '.join(builtins.keys())}"
        )

    return factory()


def get_nonlinearity(kind: str, coeffs: Sequence[float] = (), M: float = 1.0) -> Nonlinearity:
    """Built-in by name, or an odd polynomial when kind is 'custom'."""
    if kind.lower() == 'custom':
        return PolynomialNonlinearity(coeffs, M=M)
    return make_builtin(kind)


__all__ = [
    'Nonlinearity', 'PolynomialNonlinearity', 'SineNonlinearity', 'HypothesisReport',
    'allen_cahn', 'check_hypotheses', 'get_nonlinearity', 'make_builtin',
]
