"""Build script.

The compiled flow kernel is optional: if Cython or a C compiler is
missing, or the extension fails to build, the install falls back to the
pure numpy kernel selected at import time in todasov.kernels.
"""

import os
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext

PYX = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                   "src", "todasov", "_flowkernel.pyx")


def extensions():
    if not os.path.exists(PYX):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building without the compiled flow kernel")
        return []
    from setuptools import Extension

    ext = Extension(
        "todasov._flowkernel",
        sources=[os.path.relpath(PYX)],
    )
    return cythonize([ext], language_level=3)


class optional_build_ext(build_ext):
    """Swallow compiler failures so the pure-Python install still works."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped: {exc}")


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
