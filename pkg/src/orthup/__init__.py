"""Desk-scale numerical verification of sharp Heisenberg-type uncertainty
inequalities on orthants: sharp constants, exact identities, equality cases
and stability estimates, each checked against two independent integration
backends (tensor Gauss quadrature and a Gamma-moment oracle)."""

from .domain_model import (
    OrthantSpec,
    PolyGauss,
    ScaledGaussianMeasure,
    TestField,
    WeightExponents,
    dilate_field,
    field_eval,
    field_from_residual_descriptor,
    make_extremal,
    sphere_area,
)
from .deficits import (
    DeficitReport,
    additive_deficit,
    deficit_report,
    full_space_deficits,
    identity_residual,
    identity_rhs,
    optimal_alpha,
    rho1,
)
from .functionals import (
    CoreFunctionals,
    core_functionals,
    hardy_ratio,
    hup_ratio,
    measure_mean_var,
)
from .field_catalog import (
    SUITE_NK,
    catalog_get,
    make_affine_equality,
    make_bump,
    make_polygauss_random,
    make_sharp_example,
    random_suite,
)
from .lifting import (
    LiftCheck,
    LiftPlan,
    lifted_eval,
    lifted_gradient,
    verify_dilation_pairing,
    verify_gradient_lift,
    verify_mass_lift,
    verify_moment_lift,
)
from .poincare import poincare_gap, poincare_stability_gap, rayleigh_quotient
from .projection import (
    ProjectionResult,
    centered_triple_form,
    dist_to_E,
    dist_to_E_norm_constrained,
    dist_to_affine_family,
    gaussian_center_dist,
)
from .quadrature import (
    AxisRule,
    QuadratureConfig,
    QuadratureGrid,
    half_gauss_rule,
    half_monomial_rule,
    hermite_rule,
    legendre_panel_rule,
    tensor_integrate,
)

__version__ = "0.1.0"
