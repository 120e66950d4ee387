"""Build script: compiles the optional convolution core.

The package works without the extension (a NumPy fallback is selected at
import time), so the extension is marked optional and any build failure is
non-fatal.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "latfac._convcore",
                ["src/latfac/_convcore.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
