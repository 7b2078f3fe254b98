import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "eqsim._kernels",
                ["src/eqsim/_kernels.pyx"],
                include_dirs=[np.get_include()],
                # limited-range complex arithmetic avoids the libgcc __muldc3 call
                extra_compile_args=["-O3", "-fcx-limited-range"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
