"""Information-geometric chaos indicators.

Builds Fisher-Rao metric fields over parametric probability families,
computes their curvature, integrates geodesic and geodesic-deviation flows,
measures entropy growth of the swept statistical volume, and packages the
case-study experiments behind a deterministic CLI.
"""

from .curvature import (
    CurvatureReport,
    christoffel,
    riemann_ricci_scalar,
    sectional_curvature,
)
from .dynamics import (
    GeodesicTrajectory,
    JacobiSeries,
    fit_exponential_rate,
    integrate_geodesic,
    integrate_jacobi,
    orthogonal_unit_deviation,
)
from .entropy import (
    Box,
    GrowthClassification,
    IGESeries,
    classify_growth,
    ige_series,
    region_volume,
    statistical_volume,
    swept_region,
)
from .errors import (
    ConfigError,
    DomainError,
    DomainExitError,
    FitError,
    GeochaosError,
    QuadratureError,
    SingularMetricError,
    StiffnessError,
    UnsupportedFamilyError,
)
from .manifold import (
    MetricField,
    ParametricFamily,
    QuadratureSpec,
    euclidean_metric,
    finite_difference_metric,
    fisher_metric_analytic,
    fisher_metric_numeric,
    index_map,
    make_family,
    product_manifold,
)
from .models import (
    ExperimentReport,
    gaussian_ed_experiment,
    iho_experiment,
    iho_reparametrization_check,
    spin_chain_chaotic_experiment,
    spin_chain_integrable_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ConfigError",
    "CurvatureReport",
    "DomainError",
    "DomainExitError",
    "ExperimentReport",
    "FitError",
    "GeochaosError",
    "GeodesicTrajectory",
    "GrowthClassification",
    "IGESeries",
    "JacobiSeries",
    "MetricField",
    "ParametricFamily",
    "QuadratureError",
    "QuadratureSpec",
    "SingularMetricError",
    "StiffnessError",
    "UnsupportedFamilyError",
    "christoffel",
    "classify_growth",
    "euclidean_metric",
    "finite_difference_metric",
    "fisher_metric_analytic",
    "fisher_metric_numeric",
    "fit_exponential_rate",
    "gaussian_ed_experiment",
    "ige_series",
    "iho_experiment",
    "iho_reparametrization_check",
    "index_map",
    "integrate_geodesic",
    "integrate_jacobi",
    "make_family",
    "orthogonal_unit_deviation",
    "product_manifold",
    "region_volume",
    "riemann_ricci_scalar",
    "sectional_curvature",
    "spin_chain_chaotic_experiment",
    "spin_chain_integrable_experiment",
    "statistical_volume",
    "swept_region",
]
