"""Clustering inner loops: compiled extension with a pure-numpy fallback.

The native module is built from ``_native.pyx`` when Cython and a C
compiler are available (see setup.py); otherwise, or when the
ONTOPOP_KERNELS=numpy environment variable forces it, the numpy
implementation is used.  Both backends implement identical arithmetic
and tie-breaking, so results do not depend on which one is loaded.
"""

from __future__ import annotations

import os

from . import _numpy

_FORCE = os.environ.get("ONTOPOP_KERNELS", "").strip().lower()

if _FORCE == "numpy":
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        if _FORCE == "native":
            raise ImportError(
                "ONTOPOP_KERNELS=native but the compiled extension is not built; "
                "run `python setup.py build_ext --inplace`"
            )
        _impl = _numpy
        BACKEND = "numpy"

lloyd = _impl.lloyd
average_linkage = _impl.average_linkage


def get_backend(name: str):
    """Explicit backend lookup, used by the benchmark and parity tests."""
    if name == "numpy":
        return _numpy
    if name == "native":
        from . import _native  # noqa: F811

        return _native
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list[str]:
    names = ["numpy"]
    try:
        from . import _native  # noqa: F401

        names.append("native")
    except ImportError:
        pass
    return names
