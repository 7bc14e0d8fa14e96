"""Position-dependent number scaling: scaled arithmetic, scaling fields, scaled lengths and geodesics."""
from ._accel import backend_name
from .cosmology import CrushProfile, crush_curve, crush_factor, lightcone_time, uniform_scaling_check
from .dynamics import (
    Grid1D,
    LagrangianSpec,
    covariant_time_derivative,
    scaled_action,
    scaled_derivative,
    wavepacket_rescale,
)
from .errors import ConvergenceError, DimensionError, DomainError, QuadratureError, ScalingError
from .fields import (
    FieldCatalogEntry,
    ScalarField,
    VectorField,
    grad_theta,
    make_field,
    scale_factor_gradient,
    scale_factor_neighbor,
    scale_factor_path,
)
from .geodesics import (
    DiscretePath,
    OptimizerOptions,
    discrete_scaled_length,
    distance_scaled,
    el_residual,
    minimize_scaled_length,
)
from .geometry import (
    Metric,
    ScaledLengthResult,
    coord_transport,
    line_element,
    line_element_scaled,
    path_length,
    path_length_scaled,
    reference_change,
)
from .holes import HoleProfile, hole_curve, hole_scaled_distance, outward_scaled_distance, scaled_speed
from .paths import Path
from .quadrature import QuadratureOptions
from .scaled_numbers import (
    ScaledStructure,
    ScaledVectorSpace,
    TransportMap,
    check_equation_invariance,
    correspond,
    scaled_add,
    scaled_div,
    scaled_inner,
    scaled_mul,
    scaled_vector_scale,
)
from .tables import Table, emit_csv, emit_svg

__version__ = "0.1.0"
