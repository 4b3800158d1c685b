"""Numerical verification of the extrinsic geometry of space-like surfaces
in 4-dimensional neutral pseudo-Riemannian space forms."""

from .ambient import AmbientSpace, DomainRect
from .catalog import (
    Immersion,
    JetPoint,
    catalog_entries,
    catalog_get,
    catalog_names,
    check_membership,
    from_definition,
    induced_metric,
)
from .curvature import (
    CanonicalFrame,
    ConnectionSample,
    CurvatureReport,
    EllipseInfo,
    FrameData,
    SecondFF,
    ambient_curvature,
    build_frames,
    canonical_equality_frame,
    codazzi_residual,
    connection_forms,
    ellipse_of_curvature,
    equality_frame,
    invariants,
    point_report,
    second_fundamental_form,
    shape_operators,
    structure_equation_check,
    wintgen_defect_formula,
)
from .errors import (
    DegeneracyError,
    ExprSyntaxError,
    FieldDomainError,
    InputMismatchError,
    NeutralSurfError,
    PreconditionError,
    SingularityError,
)
from .expr import SurfaceDefinition, eval_on_jets, expr_to_text, parse_expression, parse_surface
from .fields import (
    GridField,
    LaplacianReport,
    SurfaceSample,
    convergence_ratios,
    grid_from_csv,
    grid_from_json,
    grid_to_csv,
    grid_to_json,
    harmonicity_verdict,
    intrinsic_laplacian,
    sample_field,
    sample_surface,
    verify_identity,
)
from .jets import Jet2
from .pseudo_linalg import PVector, Signature, Sym2, eigen_sym2, inner, orthonormalize

__version__ = "0.1.0"
