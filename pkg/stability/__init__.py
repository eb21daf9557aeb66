from stability.eta import (
    DilatedEta,
    EtaFamily,
    FamilySearch,
    PiecewiseLinearEta,
    asymptotic_functional,
    eta_eval,
    hardy_margin,
    minimize_functional_over_family,
    random_piecewise_linear,
)
from stability.forms import (
    CallableTestFunction,
    ProfileMoments,
    QuadraticFormReport,
    QuadratureOptions,
    ScaledProfileTestFunction,
    quadratic_form_ibp,
    quadratic_form_yz,
    wedge_constant,
)
from stability.probe import PROBE_FAMILIES, ProbeReport, cone_vanishing_stability_probe
from stability.spectrum import (
    DiscreteForm,
    EigenOptions,
    MorseAnnuliReport,
    SpectrumReport,
    assemble_quadratic_form,
    discrete_form,
    linearized_spectrum,
    morse_annuli,
    rayleigh_quotient,
)
from stability.sweep import SweepPoint, SweepReport, instability_sweep, separable_contrast

__all__ = [
    'CallableTestFunction', 'DilatedEta', 'DiscreteForm', 'EigenOptions', 'EtaFamily', 'FamilySearch',
    'MorseAnnuliReport', 'PROBE_FAMILIES', 'PiecewiseLinearEta', 'ProbeReport', 'ProfileMoments',
    'QuadraticFormReport', 'QuadratureOptions', 'ScaledProfileTestFunction', 'SpectrumReport',
    'SweepPoint', 'SweepReport', 'assemble_quadratic_form', 'asymptotic_functional',
    'cone_vanishing_stability_probe', 'discrete_form', 'eta_eval', 'hardy_margin', 'instability_sweep',
    'linearized_spectrum', 'minimize_functional_over_family', 'morse_annuli', 'quadratic_form_ibp',
    'quadratic_form_yz', 'random_piecewise_linear', 'rayleigh_quotient', 'separable_contrast',
    'wedge_constant',
]
