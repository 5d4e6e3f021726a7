import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SPECTRAL_OUS_PURE_PYTHON", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        # optional: a failed compile leaves the pure-Python kernels in charge
        ext_modules = cythonize(
            [Extension("spectral_ous._kernels", ["src/spectral_ous/_kernels.pyx"],
                       include_dirs=[np.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3"], optional=True)],
            compiler_directives={"language_level": 3, "boundscheck": False,
                                 "wraparound": False, "cdivision": True},
        )

setup(ext_modules=ext_modules)
