"""Complex Binet-Legendre transform and invariant metrics of model domains."""

__version__ = "0.1.0"

from .domains import (
    DomainSpec,
    TangentSample,
    UnsupportedError,
    ball,
    disc,
    ellipsoid,
    halfplane,
    indicatrix,
    kobayashi_busemann,
    kobayashi_distance_ball,
    kobayashi_royden,
    polydisc,
    product,
    punctured_disc,
)
from .field import CurveSpec, MetricSample, field_sweep, hsc_estimate, integrated_length, kappa_at, pullback
from .finsler import (
    Pseudonorm,
    busemann_convexify,
    dual_norm,
    ellipsoid_gauge,
    euclidean,
    hermitian_norm,
    lq_norm,
    max_combination,
    max_norm,
    triangle_defect,
)
from .hermitian import HermitianForm, congruence, evaluate, invert
from .quadrature import QuadratureRule, default_rule, sphere_integrate
from .transform import MomentMatrix, complex_bl, complex_bl_dual, dualize, product_bl, real_bl
from .wu import EllipsoidForm, mvee_balanced, wu_metric, wu_sandwich_report

__all__ = [name for name in dir() if not name.startswith("_")]
