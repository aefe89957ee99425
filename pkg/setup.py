import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "invtool._fqcore",
                ["src/invtool/_fqcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # without Cython the package still installs; invtool.fq falls back to
    # the numpy table kernels at import time
    extensions = []

setup(ext_modules=extensions)
