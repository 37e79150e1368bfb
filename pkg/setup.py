"""Build script.

The windowed min/max filters have a Cython implementation used on every
ACK; if the extension cannot be built the package falls back to the pure
Python filters at import time, so the build is allowed to proceed without
the compiled module.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fairtt_sim/_filters_c.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
