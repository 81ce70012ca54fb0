"""Random-variate generation on the circle and the curved torus surface.

The package provides area-uniform sampling of the torus surface through a
rejection-free transform, a histogram acceptance-rejection engine for
arbitrary bounded circular densities (streaming and batched), two classical
rejection baselines, and a validation harness with goodness-of-fit tests and
acceptance-rate tables.
"""

from .distributions import (
    AreaUniformMarginal,
    CircularDensity,
    CircularUniform,
    KatoJones,
    TorusWeighted,
    VonMises,
    WrappedCauchy,
    area_uniform_cdf,
    kato_jones_params,
    mobius_shift,
    numeric_normalizer,
    von_mises_torus_normalizer,
)
from .geometry import (
    TWO_PI,
    AnglePair,
    Point3,
    TorusGeometry,
    area_element,
    embed,
    embed_angles,
    quadrant_area_proportions,
    surface_area_quadrature,
    wrap_angle,
)
from .samplers import (
    AcceptanceReport,
    HarEnvelope,
    RngStream,
    aur_sample,
    eau_sample,
    eau_transform,
    har_build,
    har_marginal_sampler,
    har_sample,
    har_sample_batch,
    torus_sample,
    uniform_angles,
    uniform_marginal_sampler,
    vmbfr_sample,
)
from .special_functions import QuadratureSpec, bessel_i, periodic_integral
from .validation import (
    EcdfSummary,
    QuadrantTable,
    acceptance_table,
    chi_square_quadrants,
    dominance_gap,
    histogram,
    ks_critical,
    ks_statistic,
    numeric_cdf,
    reference_table,
)

__version__ = "0.1.0"

__all__ = [
    "TWO_PI",
    "AnglePair",
    "Point3",
    "TorusGeometry",
    "wrap_angle",
    "embed",
    "embed_angles",
    "area_element",
    "surface_area_quadrature",
    "quadrant_area_proportions",
    "QuadratureSpec",
    "bessel_i",
    "periodic_integral",
    "CircularDensity",
    "CircularUniform",
    "AreaUniformMarginal",
    "VonMises",
    "WrappedCauchy",
    "KatoJones",
    "TorusWeighted",
    "area_uniform_cdf",
    "von_mises_torus_normalizer",
    "numeric_normalizer",
    "kato_jones_params",
    "mobius_shift",
    "RngStream",
    "AcceptanceReport",
    "HarEnvelope",
    "eau_transform",
    "eau_sample",
    "aur_sample",
    "har_build",
    "har_sample",
    "har_sample_batch",
    "vmbfr_sample",
    "torus_sample",
    "uniform_angles",
    "har_marginal_sampler",
    "uniform_marginal_sampler",
    "EcdfSummary",
    "QuadrantTable",
    "ks_statistic",
    "ks_critical",
    "chi_square_quadrants",
    "numeric_cdf",
    "histogram",
    "dominance_gap",
    "acceptance_table",
    "reference_table",
    "__version__",
]
