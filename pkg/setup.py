"""Build script: compiles the Cython stepper core when Cython is available.

The package works without the extension (a NumPy fallback is selected at
import time), so a skipped extension build is not fatal.
"""

import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/homolab/_core_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
