"""Build hook for the optional compiled kernel.

The package is fully functional without the extension; ntpzip.kernels
falls back to the pure-Python implementation when the build is skipped
(NTPZIP_PURE_PYTHON=1) or the module is absent at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("NTPZIP_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/ntpzip/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
