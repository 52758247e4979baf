"""Build script: compiles the optional Cython kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing Cython toolchain degrades to a pure-Python
install instead of failing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "quakefit.kernels._compiled",
                ["src/quakefit/kernels/_compiled.pyx"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
