"""Planar elastica toolkit: elliptic functions, closed-form elasticae, discrete
curve functionals, self-intersection analysis and elastic flows."""

from .curves import (
    DegenerateCurveError,
    DiscreteCurve,
    IntersectionEvent,
    IntersectionReport,
    LiYauResult,
    Verdict,
    WindingAmbiguityError,
    as_curve,
    dual_lengths,
    elastic_energy,
    embeddedness_ratio,
    energy_length_product,
    fenchel_example,
    is_embedded,
    length,
    liyau_check,
    reparametrize_constant_speed,
    self_intersections,
    total_curvature,
    turning_angles,
    turning_number,
    winding_number,
)
from .elastica_zoo import (
    ElasticaPrototype,
    FigureEight,
    Kind,
    Parametrization,
    circle_curve,
    crossing_determinant,
    elastica_residual,
    eval_curvature,
    eval_point,
    eval_tangent,
    figure_eight,
    figure_eight_curve,
    prototype_curve,
)
from .elliptic import (
    DomainError,
    EllipticConstants,
    RootNotBracketedError,
    complete_E,
    complete_K,
    compute_constants,
    constants,
    find_m_star,
    incomplete_E,
    incomplete_F,
    jacobi_am,
    jacobi_sn_cn_dn,
)
from .flow import (
    FlowConfig,
    FlowDiagnostics,
    FlowMode,
    FlowState,
    Redistribution,
    StepFailure,
    ZeroEnergyError,
    curvature_vectors,
    fit_circle,
    lambda_length_preserving,
    penalized_energy,
    run,
    step,
    velocity_field,
)
from .estimators import CurveDescriptor, ElasticFlow
from .shapes import ellipse_curve, limacon_curve, regular_polygon

__version__ = "0.1.0"
