"""Census of orientable 3-manifolds from face identifications of Platonic solids."""

from .coxeter import (
    CoxeterSymbol,
    GeometryClass,
    Node,
    Presentation,
    SolidDescriptor,
    all_solids,
    classify_geometry,
    edge_divisibility_filter,
    enumerate_solids,
    parse_symbol,
    presentation,
    solid_for_address,
    standard_parabolic,
    torsion_representatives,
)
from .coset import CosetTable, coset_enumeration, finite_group_elements
from .errors import BudgetExceeded, CertificationFailure, OverflowSlotError

__version__ = "0.1.0"
