"""Numerical workbench for Bergman kernels, Berezin transforms, and radial
Toeplitz spectra on complete Reinhardt domains in C^2 and on product domains.
"""

from .bergman import (
    KernelValue,
    MonomialNormTable,
    kernel_closed_form,
    kernel_reinhardt,
    monomial_norm_sq,
    normalized_kernel,
    reproduce_check,
)
from .berezin import (
    BerezinEvaluation,
    DiscBerezinEvaluator,
    ProductBerezinEvaluator,
    ReinhardtBerezinEvaluator,
    SeparableTerm,
    berezin_diagonal_operator,
    berezin_disc,
    berezin_disc_radial,
    berezin_product,
    berezin_radial,
    reinhardt_region,
    sup_norm_search,
)
from .domains import (
    BumpSymbol,
    MonomialIndex,
    ProductDomainSpec,
    RadialProfile,
    ReinhardtDomain2D,
    build_bump,
    check_logconvexity,
    default_profile,
    make_domain,
    membership,
    unit_profile,
)
from .quadrature import QuadratureResult, adaptive_integrate, fixed_gauss, radial_moment
from .regularity import (
    BoundaryPath,
    MassProfile,
    ProbeReport,
    bc_probe,
    coordinate_path,
    delta_test,
    essential_norm_identity_check,
    mass_profile,
    path_limit,
    radial_path,
    slanted_path,
    spherical_mean,
    test_functional,
)
from .toeplitz import (
    EigenvalueTable,
    disc_radial_eigenvalue,
    essential_norm,
    eigenvalue_limit,
    operator_norm,
    spectrum_approx,
    toeplitz_eigenvalue,
)

__version__ = "0.1.0"
