"""Explicit families: profiles, warp fields, companion systems, charts and their certification."""

from .blocks import BlockName, BuildingBlock, builtin_block, list_blocks
from .charts import FAMILIES, ChcVariant, FamilyError, construct_family
from .companions import CompanionVariant, InconsistentFieldError, integrate_companions
from .profiles import ProfileKind, cn_closed_form, cn_initial_data, integrate_profile
from .warp import WarpKind, WarpMode, solve_warp_field
from .certify import certify_all, certify_chart, certify_family, resolve_variants

__all__ = [
    "BlockName", "BuildingBlock", "builtin_block", "list_blocks", "FAMILIES", "ChcVariant", "FamilyError",
    "construct_family", "CompanionVariant", "InconsistentFieldError", "integrate_companions", "ProfileKind",
    "integrate_profile", "cn_closed_form", "cn_initial_data", "WarpKind", "WarpMode", "solve_warp_field",
    "certify_all", "certify_chart", "certify_family", "resolve_variants",
]
