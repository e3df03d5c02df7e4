"""Build script for the optional compiled jet kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes the order-3 Taylor convolution faster.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qeflat._jetkernel",
                ["src/qeflat/_jetkernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
