"""Fundamental units, bifurcation levels and Dirichlet slices for the cusp
section of the Hilbert modular surface of Q(sqrt(n))."""

import json

from ._cusp import (
    CuspError,
    fundamental_unit,
    is_squarefree,
    levels,
    mesh,
    side_list,
    slice,
    tower_json,
    verify,
)


def tower(n):
    """The tower of Q(sqrt(n)) as a dict (same schema as `cusp_tower census`)."""
    return json.loads(tower_json(n))


__all__ = [
    "CuspError",
    "fundamental_unit",
    "is_squarefree",
    "levels",
    "mesh",
    "side_list",
    "slice",
    "tower",
    "tower_json",
    "verify",
]
