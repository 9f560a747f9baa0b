"""Build script for the optional compiled kernel core.

The package works without the extension; kpump.kernels falls back to the
pure-Python implementation when the compiled module cannot be imported.
"""
import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("KPUMP_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "kpump._kernels",
            ["src/kpump/_kernels.pyx"],
            include_dirs=[np.get_include()],
            # keep IEEE semantics identical to the Python fallback
            extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        ext_modules = cythonize(
            [ext],
            compiler_directives={"language_level": "3", "boundscheck": False,
                                 "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
