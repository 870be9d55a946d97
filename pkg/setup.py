"""Build script: compiles the optional fast-kernel extension.

The package works without the extension (a pure-Python backend is selected
at import time), so any build failure here downgrades to a warning instead
of aborting the install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "alexot._kernels._fast",
                ["src/alexot/_kernels/_fast.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    sys.stderr.write(
        "alexot: fast kernels not built (%s); falling back to pure Python\n" % exc
    )

setup(ext_modules=ext_modules)
