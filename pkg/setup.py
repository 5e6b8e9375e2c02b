import os

import numpy as np
from setuptools import Extension, setup

# NPDYN_NO_EXT=1 skips the compiled core; the package then runs on _fallback.
extensions = []
if not os.environ.get("NPDYN_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = cythonize(
            [
                Extension(
                    "npdyn._kernels",
                    ["src/npdyn/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=extensions)
