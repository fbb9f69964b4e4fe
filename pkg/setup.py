"""Build script: compiles the optional Cython kernel extension.

If the toolchain is unavailable the install still succeeds; gridxai then
runs on the pure-NumPy kernel backend (selected automatically at import).
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "gridxai._kernels._core",
                ["src/gridxai/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off keeps the compiled kernels bit-compatible
                # with the NumPy fallback (no fused multiply-add).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - toolchain probe
    sys.stderr.write(f"gridxai: skipping Cython kernels ({exc}); using pure-Python backend\n")

setup(ext_modules=ext_modules)
