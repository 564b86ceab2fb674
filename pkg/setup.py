"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure numpy fallback is selected
at import time); set SHEETPLAN_NO_EXT=1 to skip compilation entirely.
Build in place with `python setup.py build_ext --inplace`.
"""
import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("SHEETPLAN_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "sheetplan._hangcore",
                    sources=["src/sheetplan/_hangcore.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
