"""Directional derivative-of-Poisson-kernel wavelets on n-dimensional spheres.

Modules
-------
special        Gegenbauer polynomials, normalization constants, dimensions.
harmonics      Spherical geometry, sector harmonics, coefficient extraction.
rotderiv       The rotational derivative ladder on coefficient fields.
wavelets       Poisson/heat kernels, directional wavelets, closed forms.
admissibility  Gamma mixing coefficients and the admissible-pair conditions.
transform      Sphere/SO(3) quadrature, wavelet transform and inversion.
euclid         Stereographic parametrization and flat-space limit profiles.
cli            Command-line front end (evaluation, verification, reports).
"""

from .special import (
    LambdaParam,
    surface_measure,
    gegenbauer_batch,
    gegenbauer_derivative,
    norm_const_a,
    dim_harmonic,
    reproducing_kernel,
)
from .harmonics import (
    SphericalPoint,
    SectorHarmonicIndex,
    to_cartesian,
    from_cartesian,
    rotate_in_plane,
    eval_sector_harmonic,
    gauss_jacobi_rule,
    gegenbauer_coefficient,
)
from .rotderiv import (
    CoefficientField,
    beta,
    derivative_step,
    derivative_order,
    synthesize,
    structure_polynomial_check,
)
from .wavelets import (
    WaveletSpec,
    TruncationError,
    KIND_POISSON,
    KIND_HEAT,
    kernel_zonal_coeffs,
    directional_wavelet_field,
    modified_wavelet_field,
    g1_closed,
    g2_closed,
    truncation_degree,
)
from .admissibility import (
    GammaVector,
    GammaSolveError,
    q_polynomial,
    solve_gamma,
    admissibility_constant,
    verify_pair_condition1,
    zonal_product_series,
    tail_integral,
    tail_l1_sweep,
)
from .transform import (
    SphereGrid,
    RotationGrid,
    build_sphere_grid,
    build_rotation_grid,
    wavelet_transform,
    inverse_transform,
    round_trip,
    per_degree_reconstruction_check,
)
from .euclid import (
    EuclideanPoint,
    inverse_stereographic,
    euclidean_limit_eval,
    limit_convergence_probe,
)

__version__ = "0.1.0"
