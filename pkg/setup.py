"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a NumPy/SciPy
implementation of the same kernels is selected at import time), so a
missing compiler or Cython must not make the install fail.
"""

import os
import sys

from setuptools import Extension, setup

_PYX = os.path.join("src", "manifold_means", "_kernels_cy.pyx")


def _extensions():
    if not os.path.exists(_PYX):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("manifold-means: Cython unavailable, building without the "
              "compiled kernels", file=sys.stderr)
        return []
    ext = Extension("manifold_means._kernels_cy", [_PYX])
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions())
