"""Builds the optional compiled kernel extension.

The package works without the extension (a pure numpy/Python backend is
selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "payoffdesign._kernels._speedups",
                ["src/payoffdesign/_kernels/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
