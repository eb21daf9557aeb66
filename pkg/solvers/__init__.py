from solvers.energy import (
    EnergyTerms,
    checked_nodes,
    discrete_energy,
    discrete_residual,
    el_residual,
    energy_gradient,
    energy_terms,
)
from solvers.field import Field, SaddleField, boundary_values, initial_guess, reflect_odd, zero_field
from solvers.growth import GrowthStudy, energy_growth_study, zero_field_growth
from solvers.minimize import METHODS, SolveReport, SolverOptions, minimize

__all__ = [
    'EnergyTerms', 'Field', 'GrowthStudy', 'METHODS', 'SaddleField', 'SolveReport', 'SolverOptions',
    'boundary_values', 'checked_nodes', 'discrete_energy', 'discrete_residual', 'el_residual',
    'energy_gradient', 'energy_growth_study', 'energy_terms', 'initial_guess', 'minimize',
    'reflect_odd', 'zero_field', 'zero_field_growth',
]
