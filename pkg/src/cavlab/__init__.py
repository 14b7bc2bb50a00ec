"""cavlab: a desk-scale laboratory for cavitation free boundaries in singular media.

Compute discrete minimizers of the weighted cavitation functional

    integral of  w(x) |grad u|^2  +  eps * indicator(u > 0)

for weights that blow up along coordinate subspaces, then measure the
geometry the theory predicts at singular free-boundary points: the sharp
growth rate 1 + |alpha|/2, the explicit nondegeneracy constant, dyadic
decay, positive density, and the scaling/homogenization structure.
"""

from .weights import (
    INFINITE,
    A2Report,
    HomogenizationLimit,
    InvalidWeightSpec,
    SingularityBounds,
    WeightSpec,
    a2_constant,
    angular_modulated,
    anisotropic_product,
    ball_average,
    constant,
    dyadic_ball_family,
    eval_weight,
    homogenized_limit,
    perturbed,
    power_subspace,
    rescaled_weight,
    singularity_bounds,
    spec_from_json,
    spec_from_json_dict,
    two_cone,
    with_domain_radius,
)
from .grid import (
    BoundaryData,
    EnergyBreakdown,
    FaceWeightField,
    Grid,
    ScalarField,
    UndefinedRatio,
    discrete_flux_divergence,
    dump_field,
    energy,
    interpolate_at,
    node_weights,
    parse_field,
    poincare_ratio,
    read_field,
    sample_face_weights,
    write_field,
)
from .solver import (
    ClosenessGap,
    JumpProfile,
    MultiStartReport,
    SolveConfig,
    SolveResult,
    SolverError,
    closeness_gap,
    harmonic_replacement,
    harnack_ratio,
    minimize_cavitation,
    solve_multistart,
)
from .analysis import (
    ComparabilityReport,
    DensityReport,
    DyadicDecayRow,
    FreeBoundarySet,
    GrowthReport,
    HolderReport,
    NondegeneracyCheck,
    RegularityCheck,
    canonical_fb_node,
    check_nondegeneracy,
    check_optimal_regularity,
    distance_comparability,
    dyadic_decay_check,
    dyadic_radii,
    extract_free_boundary,
    fb_window,
    fit_growth_exponent,
    free_boundary_nodes,
    full_positive_neighborhood,
    growth_exponent,
    growth_function,
    growth_radii,
    holder_modulus,
    node_point,
    nondegeneracy_constant,
    normalized_rescaling,
    positive_density,
)
from .blowup import (
    BlowupSequence,
    ScalingIdentity,
    blowup_convergence,
    blowup_exponent,
    jump_rescale_factor,
    rescale_minimizer,
    scaling_energy_identity,
    zoomed_face_weights,
)

__version__ = "0.1.0"
