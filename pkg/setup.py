"""Build hook for the optional compiled kernels.

If Cython or a compiler is unavailable the package installs without the
extension and falls back to the pure-Python kernels at import time.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dmgwalk._kernels._fast", ["src/dmgwalk/_kernels/_fast.pyx"],
                   include_dirs=[numpy.get_include()],
                   define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")])],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
