import sys

from setuptools import Extension, setup

# The compiled kernel is an optimization, not a hard requirement: the package
# falls back to src/aqmsim/_pykernel.py at import time when the extension is
# missing. Keep floating point strictly IEEE (no fast-math, no FMA contraction)
# so both backends produce bit-identical results.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "aqmsim._kernel",
                ["src/aqmsim/_kernel.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    print("warning: Cython not available, building without the compiled kernel",
          file=sys.stderr)

setup(ext_modules=ext_modules)
