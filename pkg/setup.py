import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "boxlab._core",
                ["src/boxlab/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython: install the pure-Python package; boxlab.kernels falls back
    # to the numpy implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
