"""Build script.

The compiled kernel (orbipar._speedups) is optional: it is built when Cython
and a C compiler are available, otherwise the package installs pure-Python
only and orbipar.kernels falls back to the interpreted kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/orbipar/_speedups.pyx"],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
