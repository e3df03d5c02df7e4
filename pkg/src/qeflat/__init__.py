"""qeflat: curvature tensors and quasi-Einstein structure checks.

Metrics are given as expressions in chart coordinates; all derivatives up
to third order come from exact truncated-Taylor (jet) arithmetic, and
every geometric identity is checked numerically against stated tolerances.
"""

from ._backend import backend_name
from .adapted import (
    SamplePlan,
    check_adapted_identities,
    check_level_set_constancy,
    cotton_component_checks,
    fiber_sectional_curvature,
    frame,
    mean_curvature,
    second_fundamental_form,
    theorem_verdict,
    umbilicity_defect,
)
from .chart import MetricSpec, PotentialSpec, metric_from_strings
from .conformal import (
    check_conformal_ricci_formula,
    check_special_mu,
    check_two_eigenvalue_structure,
    conformal_metric,
)
from .curvature import (
    CurvaturePack,
    check_weyl_divergence,
    christoffel,
    cotton,
    curvature_pack,
    ricci_scalar,
    riemann,
    weyl,
)
from .errors import (
    InputError,
    InsufficientJetOrderError,
    PreconditionError,
    QeflatError,
    SingularMetricError,
)
from .expr import Expression, evaluate, parse, pretty
from .findiff import fd_partials
from .jets import Jet, JetContext, constant_jet, seed
from .metricfile import load_metric_file, render_metric_file
from .quasi_einstein import (
    check_commutator_identity,
    check_gradient_scalar_identity,
    check_trace_identity,
    qe_residual,
)
from .report import CheckReport, render_json, render_table
from .tensors import JetTensor, MetricAtPoint, TensorValue, contract, covariant_derivative, raise_lower
from .warp import WarpSpec, build_warped_chart, catalog, catalog_names, check_warped_lcf

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "SamplePlan",
    "check_adapted_identities",
    "check_level_set_constancy",
    "cotton_component_checks",
    "fiber_sectional_curvature",
    "frame",
    "mean_curvature",
    "second_fundamental_form",
    "theorem_verdict",
    "umbilicity_defect",
    "MetricSpec",
    "PotentialSpec",
    "metric_from_strings",
    "check_conformal_ricci_formula",
    "check_special_mu",
    "check_two_eigenvalue_structure",
    "conformal_metric",
    "CurvaturePack",
    "check_weyl_divergence",
    "christoffel",
    "cotton",
    "curvature_pack",
    "ricci_scalar",
    "riemann",
    "weyl",
    "InputError",
    "InsufficientJetOrderError",
    "PreconditionError",
    "QeflatError",
    "SingularMetricError",
    "Expression",
    "evaluate",
    "parse",
    "pretty",
    "fd_partials",
    "Jet",
    "JetContext",
    "constant_jet",
    "seed",
    "load_metric_file",
    "render_metric_file",
    "check_commutator_identity",
    "check_gradient_scalar_identity",
    "check_trace_identity",
    "qe_residual",
    "CheckReport",
    "render_json",
    "render_table",
    "JetTensor",
    "MetricAtPoint",
    "TensorValue",
    "contract",
    "covariant_derivative",
    "raise_lower",
    "WarpSpec",
    "build_warped_chart",
    "catalog",
    "catalog_names",
    "check_warped_lcf",
    "__version__",
]
