"""Build script: compiles the hot-loop kernels when a C toolchain is available.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "zratio._kernels",
                ["src/zratio/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - toolchain-dependent
    print(f"zratio: skipping compiled kernels ({exc}); pure-python fallback "
          "will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
