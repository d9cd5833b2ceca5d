"""Optionally build the Cython kernel extension.

The package is fully functional without it (the numpy/scipy reference
backend is selected at import time), so a missing compiler or Cython only
costs speed, never correctness. Any failure here is reported as a warning
and the build continues pure-Python.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing: fall back silently
            warnings.warn(f"compiled kernels skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped: {exc}")


ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension(
            "fso_noma._kernels._core",
            ["src/fso_noma/_kernels/_core.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_9_API_VERSION")],
            extra_compile_args=["-O3"],
        )],
        language_level=3,
    )
except Exception as exc:
    warnings.warn(f"Cython/numpy unavailable, building pure-Python only: {exc}")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
