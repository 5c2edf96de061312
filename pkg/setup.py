"""Build script: compiles the hot-kernel extension when Cython is available.

The package works without it (pure-Python kernels are selected at import),
so a failed extension build degrades to a slower install instead of an error.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/rbmcascade/_kernels_cy.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3"]
except ImportError:
    pass

setup(ext_modules=ext_modules)
