"""Build the optional compiled kernels.

The Cython extension is optional: if it cannot be compiled the package
falls back to the numpy kernels in ``sixr._pykernels`` at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SIXR_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "sixr._ckernels",
                    ["src/sixr/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math: field values must match the scalar path bit for bit
                    extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
                    extra_link_args=["-fopenmp"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
