"""Numerical workbench for nonlocal boxes, wirings and their orbits, the
communication-complexity collapse criteria, graph-game strategies, and
Clifford monogamy bounds."""

from boxlab.boxes import (
    COLLAPSE_THRESHOLD,
    bias,
    biases,
    chsh_value,
    collapse_criterion,
    is_local,
    isotropic_box,
    iterate_bias,
    local_extreme,
    make_named_box,
    mix,
    nonlocal_extreme,
    slice_coordinates,
    uniformize,
    validate_ns,
)
from boxlab.kernels import BACKEND
from boxlab.wirings import (
    box_product,
    multiplication_table,
    named_wiring,
    project_wiring,
    validate_wiring,
    wiring_from_functions,
)

__all__ = [
    "BACKEND",
    "COLLAPSE_THRESHOLD",
    "bias",
    "biases",
    "box_product",
    "chsh_value",
    "collapse_criterion",
    "is_local",
    "isotropic_box",
    "iterate_bias",
    "local_extreme",
    "make_named_box",
    "mix",
    "multiplication_table",
    "named_wiring",
    "nonlocal_extreme",
    "project_wiring",
    "slice_coordinates",
    "uniformize",
    "validate_ns",
    "validate_wiring",
    "wiring_from_functions",
]

__version__ = "0.1.0"
