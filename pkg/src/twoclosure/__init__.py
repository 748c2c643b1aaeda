"""2-closures of 3/2-transitive permutation groups and isomorphisms of their schemes."""

from .perm import Permutation, PermGroup, cycle_type
from .coherent import (
    BinaryRelation,
    CoherentConfiguration,
    ColorBijection,
    algebraic_isomorphism,
    intersection_numbers,
    is_complete,
    is_semiregular,
    is_three_halves_homogeneous,
    iso_from_regular_point,
    k_orbits,
    list_isomorphisms_bounded_base,
    point_extension,
    regular_points,
    scheme_of_group,
    verify_coherent,
    wl_closure,
)
from .isoset import IsoSet
from .oracle import aut_oracle, iso_oracle
from .closure import (
    EmbeddingWitness,
    bfc,
    bfi,
    embeddings,
    generating_pairs,
    imbed,
    iso_colored,
    iso_schemes,
    k_closure,
    solve_two_closure,
    two_closure,
)
from .zoo import FiniteField, affine_group, agammal1, agl1, as0, corpus, dihedral, gf, paley_group
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
