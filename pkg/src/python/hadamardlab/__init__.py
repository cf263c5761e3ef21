# numerical lab for Busemann functions, horoball projections and
# isometry dynamics on Euclidean, hyperbolic and product spaces
from .busemann import (  # noqa
    BusemannFunction,
    ConvexCombination,
    busemann_gradient,
    busemann_value,
    combination_gradient,
    displacement,
    inf_displacement,
    weighted_series,
)
from .complexes import (  # noqa
    build_class_complex,
    center_of,
    half_dimension_report,
    virtual_class_of,
    zeta_map,
)
from .convex import (  # noqa
    HoroballIntersection,
    check_obtuse_comparison,
    minimize_on_sphere,
    project_to_horoball,
    project_to_intersection,
    sublevel_flow,
)
from .dynamics import (  # noqa
    center_of_finite_set,
    class_center_of_mass,
    classify,
    divergence_monotonicity_check,
    horosphere_invariance_check,
    km_tracking,
)
from .errors import *  # noqa
from .inputs_to_lab import read_config, read_instances  # noqa
from .isometries import Isometry  # noqa
from .models import (  # noqa
    ModelPoint,
    ModelSpace,
    angle_at,
    distance,
    euclidean,
    geodesic_ray,
    hyperbolic,
    product,
    tits_distance,
)
from .simplex import (  # noqa
    SimplexSpec,
    approximate_simplex,
    basepoint_independence_audit,
    cone_image_region,
    cone_injectivity_audit,
    degeneracy_sequential_probe,
    dimension_bound_assert,
    error_bound_audit,
    find_large_corner,
    gradient_independence,
    horo_coordinates,
    root_lemma_audit,
    simplex_limit,
)

__version__ = "25.01"
__license__ = "BSD-3-Clause"
__author__ = "hadamardlab contributors"
