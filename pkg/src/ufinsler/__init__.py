"""U(n)-invariant complex Finsler metrics F(z, v) = sqrt(r phi(t, s))."""

from .curvature import (
    CurvatureReport, complex_spray, curvature_oracle, holomorphic_curvature, origin_curvature,
    weakly_berwald_residual,
)
from .dsl import parse_metric, to_text
from .dynamics import (
    BerwaldResidual, GeodesicTrace, SphereLengthExperiment, SprayCoefficients, berwald_residual,
    integrate_geodesic, normalize_metric, polygonal_length, spray_coefficients, spray_direct,
    spray_finite_difference,
)
from .errors import (
    DomainError, FinslerError, IntegrationAbort, InternalInconsistency, ParseError, SingularTensor,
    UnboundedAtPole, ZeroDirection,
)
from .geometry import PointDirection, point_from_ts, random_unitary, scalar_invariants
from .jets import Jet2, jet_seed
from .metrics import MetricDefn, catalog, eval_phi, from_expression, lookup, resolve_metric
from .sampling import random_points
from .tensors import (
    ConvexityReport, SweepTable, convexity_check, eigen_spectra, inverse_fundamental_tensor, levi_matrix,
    pseudoconvexity_check, real_fundamental_tensor, region_sweep,
)

__version__ = "0.1.0"
