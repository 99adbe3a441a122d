"""Backend selection for the hot geometry/event kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_kernels_py`` module is used. Setting ``COORDPURSUIT_PURE=1``
forces the fallback.
"""

import os

if os.environ.get("COORDPURSUIT_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = "compiled" if _impl.__name__.endswith("._kernels") else "python"

poly_halfplane_max = _impl.poly_halfplane_max
poly_nearest = _impl.poly_nearest
poly_sdf = _impl.poly_sdf
poly_max_fraction = _impl.poly_max_fraction
ellipse_level = _impl.ellipse_level
ellipse_nearest = _impl.ellipse_nearest
ellipse_max_fraction = _impl.ellipse_max_fraction
crossing_fraction = _impl.crossing_fraction
capture_fraction = _impl.capture_fraction
ELLIPSE_MAXITER = _impl.ELLIPSE_MAXITER

__all__ = [
    "BACKEND",
    "poly_halfplane_max",
    "poly_nearest",
    "poly_sdf",
    "poly_max_fraction",
    "ellipse_level",
    "ellipse_nearest",
    "ellipse_max_fraction",
    "crossing_fraction",
    "capture_fraction",
    "ELLIPSE_MAXITER",
]
