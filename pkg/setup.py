"""Build script for the optional compiled kernels.

The package is pure Python plus numpy; the Cython extension only accelerates
the hot loops (outcome sampling, coincidence counting, strategy scans). If
Cython or a C compiler is unavailable the build falls back to the numpy
implementation selected at import time, so the extension is best effort.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: compiled kernels skipped ({exc}); "
              "falling back to the numpy implementation")


ext_modules = []
if not os.environ.get("CHAINBELL_NO_EXTENSION"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "chainbell._kernels",
                    ["src/chainbell/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:
        print(f"WARNING: compiled kernels skipped ({exc})")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
