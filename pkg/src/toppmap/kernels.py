"""Backend selection for the hot loops.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension is missing (source checkout without a build).  Set the environment
variable ``TOPPMAP_PURE_KERNELS=1`` to force the pure backend, e.g. for the
backend-comparison benchmark.
"""

from __future__ import annotations

import os

if os.environ.get("TOPPMAP_PURE_KERNELS"):
    from . import _kernels_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "pure"

iterate_into = _impl.iterate_into
step_n = _impl.step_n
converge = _impl.converge
period_scan = _impl.period_scan

# Result codes shared by converge() in both backends.
CODE_CONVERGED = 0
CODE_MAX_ITER = 1
CODE_EXITED = 2


def available_backends() -> dict[str, object]:
    """Import whichever backends exist; keys are 'compiled' and/or 'pure'."""
    backends: dict[str, object] = {}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        backends["compiled"] = _kernels
    except ImportError:
        pass
    from . import _kernels_py

    backends["pure"] = _kernels_py
    return backends
