"""Build script: compiles the optional native kernel extension.

The package is pure Python plus numpy; the Cython extension only
accelerates the clustering inner loops and is skipped (with a warning)
when Cython or a C compiler is unavailable.  `ontopop._kernels` falls
back to the numpy implementation at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ONTOPOP_NO_NATIVE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "ontopop._kernels._native",
                    ["src/ontopop/_kernels/_native.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
