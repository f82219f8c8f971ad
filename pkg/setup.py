"""Build script for the compiled kernel extension.

The package works without the extension (a pure-Python mirror is selected
at import time), so a failed compile should not block installation. When
Cython and a C toolchain are present the extension is built with -O3.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "hawkes_mdl._kernels",
                ["src/hawkes_mdl/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    extensions = []

setup(ext_modules=extensions)
