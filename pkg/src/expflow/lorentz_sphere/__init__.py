"""Real Jordan decomposition, matrix exponential and the conformal Lorentz action on spheres."""

from expflow.lorentz_sphere.expm import matrix_exp
from expflow.lorentz_sphere.jordan import (
    TAU_J,
    Cluster,
    JordanDecomposition,
    matrix_from_json,
    matrix_to_json,
    real_jordan,
)
from expflow.lorentz_sphere.sphere import (
    GeneratorClass,
    LorentzElement,
    SpherePoint,
    boost_generator,
    classify_generator,
    conformal_act,
    conformal_factor,
    eta,
    lie_algebra_membership,
    null_rotation_generator,
    orbit_limit_numeric,
    orbit_limit_predict,
    projective_act,
    random_algebra_element,
    random_sphere_points,
    rotation_generator,
    sigma_pullback,
    sphere_points,
)

__all__ = [
    "TAU_J",
    "Cluster",
    "GeneratorClass",
    "JordanDecomposition",
    "LorentzElement",
    "SpherePoint",
    "boost_generator",
    "classify_generator",
    "conformal_act",
    "conformal_factor",
    "eta",
    "lie_algebra_membership",
    "matrix_exp",
    "matrix_from_json",
    "matrix_to_json",
    "null_rotation_generator",
    "orbit_limit_numeric",
    "orbit_limit_predict",
    "projective_act",
    "random_algebra_element",
    "random_sphere_points",
    "real_jordan",
    "rotation_generator",
    "sigma_pullback",
    "sphere_points",
]
