"""Finite categories, their sandwich semigroups, and exhaustive checks of
their structure (Green's relations, regular parts, ranks)."""

from .category import Category, Morphism, build_category, compose, inverses, regular_mask
from .errors import BudgetError, DomainMismatch, PreconditionError, SandwichKitError, Unsupported
from .frame import RegularFrame, build_frame, is_sandwich_regular
from .green import GreenData, green_category, green_semigroup
from .rank import RankResult, idrank, rank, relative_idrank, relative_rank
from .sandwich import SandwichSemigroup, sandwich
from .semigroup import FiniteSemigroup

__version__ = "0.1.0"

__all__ = [
    "Category", "Morphism", "build_category", "compose", "inverses", "regular_mask",
    "BudgetError", "DomainMismatch", "PreconditionError", "SandwichKitError", "Unsupported",
    "RegularFrame", "build_frame", "is_sandwich_regular",
    "GreenData", "green_category", "green_semigroup",
    "RankResult", "idrank", "rank", "relative_idrank", "relative_rank",
    "SandwichSemigroup", "sandwich", "FiniteSemigroup",
]
