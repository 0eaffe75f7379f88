"""Quiver Hecke (KLR) algebras, graded modules, R-matrices, and localization.

Exact rational arithmetic throughout; see README.md for an overview and
demos/ for narrative walkthroughs of each capability.
"""

__version__ = "0.1.0"

from .cartan import CartanDatum, Weight, ConvexOrder, bilinear, weyl_act, positive_roots_of
from .algebra import KLRContext, QParams, AlgElement, intertwiner, central_p, outer_tensor
from .modules import (
    GradedModule,
    ModuleHom,
    hom_space,
    one_dim,
    dual,
    eps,
    eps_star,
    gW,
    gW_star,
    restrict,
)
from .conv import (
    convolve,
    cached_conv,
    Affinization,
    affinize_letter,
    affinize_power,
    affinize_generic,
    check_affinization,
    renorm_r,
    lambda_tilde,
    d_invariant,
    chi_lep,
    RResult,
)
from .simples import (
    simples_up_to,
    crystal_f,
    crystal_e,
    head,
    socle,
    is_simple,
    hconv,
    strongly_commutes,
    self_dual_normalize,
    isomorphic,
)
from .braiders import (
    GradedBraider,
    braider_from,
    BraiderFamily,
    canonical_family,
    DetSpec,
    detmod,
    frozen,
    in_Cw,
    verify_cuspidal,
)
from .localization import (
    LocContext,
    LocObject,
    LocHom,
    left_dual_Ll,
    verify_thick_dual,
    a_involution,
    right_dual_finite,
    periodicity_check,
)
from .groth import QChar, qshuffle, q_commute, k_decompose, OreRing, OreElement
