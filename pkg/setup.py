"""Build script for the optional compiled engine core.

The package is fully functional without the extension (a pure-Python core is
selected at import time); building it makes simulations roughly an order of
magnitude faster. `pip install -e . --no-build-isolation` compiles it when
Cython and a C compiler are available.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "gemelites.engine._ccore",
                sources=["src/gemelites/engine/_ccore.pyx"],
                extra_compile_args=["-O3"],
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

setup(ext_modules=ext_modules)
