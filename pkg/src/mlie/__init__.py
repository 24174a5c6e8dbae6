"""Multiplicative Lie algebra structures on finite groups given by Cayley tables."""

from .errors import *  # noqa: F401,F403
from .groups import (
    GroupHom,
    GroupTable,
    Subset,
    abelian,
    center,
    comm,
    conj,
    construct_standard_group,
    cyclic,
    derived_subgroup,
    dihedral,
    direct_product,
    heisenberg,
    is_class2,
    is_normal,
    metacyclic,
    normal_closure,
    quaternion8,
    quotient,
    subgroup_closure,
    validate_group,
)
from .mla import (
    MLA,
    LieRing,
    SeriesReport,
    StarTable,
    Violation,
    certify,
    check_derived_identities,
    check_mla_axioms,
    class2_property_report,
    combine_structures,
    gamma_series,
    ideal_closure,
    induced_quotient_star,
    is_mla,
    lie_commutator,
    lie_series,
    lz_center,
    mz_center,
    star_improper,
    star_span,
    star_trivial,
)
from .search import (
    SearchOptions,
    SearchResult,
    abelian_bracket_oracle,
    automorphism_group,
    dedup_stars,
    enumerate_stars,
)
from .extension import (
    CentralPairing,
    ExtensionData,
    build_group_from_extension,
    build_star_from_extension,
    central_pairing_to_star,
    enumerate_central_pairings,
    metacyclic_star,
    star_to_central_pairing,
    verify_cocycle,
    verify_star_compatibility,
)

__version__ = "0.1.0"
