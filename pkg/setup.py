from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "iekf_slam.kernels._native",
                ["src/iekf_slam/kernels/_native.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    # No Cython available: install with the pure-Python kernel only.
    pass

setup(ext_modules=ext_modules)
