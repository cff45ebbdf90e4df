"""Background shear profile: heat-extended W and the reconstructed U."""
from couette_lab.modules.shear.profile import (
    ShearProfile,
    heat_step,
    load_shear_coeffs,
    reconstruct_shear,
    sobolev_norm_h4,
)

__all__ = [
    "ShearProfile",
    "heat_step",
    "load_shear_coeffs",
    "reconstruct_shear",
    "sobolev_norm_h4",
]
