"""Numeric kernels with a compiled fast path.

The Cython extension (`_core`) is preferred when importable; otherwise
the numpy fallback is used.  GAPDECOMP_BACKEND forces the choice:

    auto    compiled if available, fallback otherwise (default)
    cython  compiled, ImportError if the extension is missing
    python  fallback, even when the extension exists

`BACKEND` records which one is active.
"""

import os

_requested = os.environ.get("GAPDECOMP_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "cython", "python"):
    raise ImportError(
        "GAPDECOMP_BACKEND must be 'auto', 'cython' or 'python', "
        f"got {_requested!r}"
    )

if _requested == "python":
    from . import pyfallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import pyfallback as _impl

        BACKEND = "python"

logistic = _impl.logistic
bernoulli_loglik = _impl.bernoulli_loglik
path_means = _impl.path_means

__all__ = ["BACKEND", "logistic", "bernoulli_loglik", "path_means"]
