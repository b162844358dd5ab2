"""Build script: compiles the Cython kernels when a toolchain is available.

The extension is optional; if Cython or a C compiler is missing the package
installs pure-Python and glprop.backend falls back to the NumPy kernels.
Build in place for development with:

    python setup.py build_ext --inplace
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/glprop/_kernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except ImportError as exc:
    sys.stderr.write(f"warning: building without compiled kernels ({exc})\n")
    ext_modules = []

setup(ext_modules=ext_modules)
