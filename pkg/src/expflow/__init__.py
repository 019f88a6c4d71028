"""Numerical laboratory for averaging operators of flows, Diophantine data and
the conformal Lorentz action on spheres."""

from expflow.diophantine import (
    ContinuedFraction,
    DiophantineReport,
    IntegerRelation,
    cf_expand,
    classify,
    integer_relation_search,
    irrationality_exponent_estimate,
    liouville_constant,
    parse_real,
    star_discrepancy,
)
from expflow.line_circle_flows import (
    CircleField,
    FlowCurve,
    GridFunction,
    beta_s_line,
    delta_s,
    integrate_circle_flow,
    obstruction_per,
    periodize,
    preimage_beta,
    preimage_delta,
    pullback_along_flow,
)
from expflow.multiplier_calculus import (
    LatticeSpectrum,
    MultiplierReport,
    TorusFlow,
    apply_alpha_chi,
    apply_beta,
    ck_inverse_growth,
    derivation_multiplier,
    embedding_defect_search,
    invert_alpha_chi,
    kernel_indices,
    multiplier,
    sobolev_norm,
    translation_multiplier,
)
from expflow.semidirect_exp import (
    FlowDescriptor,
    SemidirectElement,
    eigenfunctional_witness,
    eigenvalue_noninjectivity_witness,
    exp_semidirect,
    periodic_singular_times,
    relation_residual,
)

__version__ = "0.1.0"
