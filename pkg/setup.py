"""Build script for the optional compiled kernel extension.

The package is importable as pure Python; the Cython extension only
accelerates the inner loops.  If no compiler (or Cython/numpy) is
available the build degrades to the numpy fallback instead of failing.
Set GAPDECOMP_NO_EXT=1 to skip the extension on purpose.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            _warn_skipped(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            _warn_skipped(exc)


def _warn_skipped(exc):
    warnings.warn(
        f"compiled kernels not built ({exc}); the pure-Python fallback "
        "will be used at runtime"
    )


def extensions():
    if os.environ.get("GAPDECOMP_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        _warn_skipped(exc)
        return []
    ext = Extension(
        "gapdecomp._kernels._core",
        ["src/gapdecomp/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
