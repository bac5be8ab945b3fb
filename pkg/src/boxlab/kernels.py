"""Kernel backend selection.

Imports the compiled extension ``boxlab._core`` when available and falls back
to the pure-numpy module otherwise.  Set ``BOXLAB_PURE_PYTHON=1`` to force the
fallback (used by the parity tests and the benchmark).
"""

import os

from boxlab import _purekernels

if os.environ.get("BOXLAB_PURE_PYTHON") == "1":
    _impl = _purekernels
    BACKEND = "python"
else:
    try:
        from boxlab import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _purekernels
        BACKEND = "python"

chsh = _impl.chsh
box_product = _impl.box_product
box_product_batch = _impl.box_product_batch
objective_batch = _impl.objective_batch
objective_power_batch = _impl.objective_power_batch
gradient_batch = _impl.gradient_batch
gradient_power_batch = _impl.gradient_power_batch
project_batch = _impl.project_batch
