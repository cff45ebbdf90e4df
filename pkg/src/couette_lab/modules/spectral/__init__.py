"""Spectral core: grids, transforms, Poisson and Green's function on T x [-1, 1]."""
from couette_lab.modules.spectral.fields import Basis, SpectralField
from couette_lab.modules.spectral.green import (
    commutator_kernel,
    green_diagonal_slope,
    green_dy,
    green_function,
    green_solve,
    green_solve_gauss,
)
from couette_lab.modules.spectral.grid import ChannelGrid
from couette_lab.modules.spectral.poisson import (
    biot_savart,
    collocation_inner,
    derivative_coeffs,
    derivative_y,
    gradient_norm_sq,
    inner_product,
    laplacian_matrix,
    poisson_solve,
    poisson_solve_field,
)
from couette_lab.modules.spectral.transforms import (
    cosine_transform,
    cosine_values,
    from_physical,
    inverse_sine_transform,
    sine_transform,
    to_physical,
)

__all__ = [
    "Basis",
    "ChannelGrid",
    "SpectralField",
    "biot_savart",
    "collocation_inner",
    "commutator_kernel",
    "cosine_transform",
    "cosine_values",
    "derivative_coeffs",
    "derivative_y",
    "from_physical",
    "gradient_norm_sq",
    "inner_product",
    "green_diagonal_slope",
    "green_dy",
    "green_function",
    "green_solve",
    "green_solve_gauss",
    "inverse_sine_transform",
    "laplacian_matrix",
    "poisson_solve",
    "poisson_solve_field",
    "sine_transform",
    "to_physical",
]
