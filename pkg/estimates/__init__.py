from estimates.checks import (
    EstimateReport,
    curvature_scale,
    discretization_slack,
    modica_check,
    pointwise_bound_check,
    profile_field,
    run_checks,
    strict_bound_check,
    supersolution_check,
    supersolution_closed_form,
    supersolution_residual,
)

__all__ = [
    'EstimateReport', 'curvature_scale', 'discretization_slack', 'modica_check',
    'pointwise_bound_check', 'profile_field', 'run_checks', 'strict_bound_check',
    'supersolution_check', 'supersolution_closed_form', 'supersolution_residual',
]
