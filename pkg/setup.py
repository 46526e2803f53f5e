import os

from setuptools import setup

# The compiled kernel core is optional: when Cython (or a C compiler) is
# unavailable the package falls back to the pure numpy kernels at import time.
ext_modules = []
if os.environ.get("CARTAN_MGS_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("cartan_mgs._core", ["src/cartan_mgs/_core.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
