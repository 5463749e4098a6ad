"""Exact tools for deciding and certifying freeness of hyperplane arrangements."""

from .arr import (
    AffineArrangement,
    Arrangement,
    ArrangementError,
    Multiarrangement,
    boolean,
    cone,
    essentialize,
    parse_arrangement,
    restrict,
    stanley_cone,
)
from .freeness import FreenessReport, free3_test, free_test, locally_free_along, recursive_free
from .lattice import build_lattice, char_poly, count_points_mod_p
from .weyl import FamilySpec, RootSystemDesc, verify_er

__version__ = "0.1.0"
