"""Build script: compiles the optional fast kernel extension when Cython is present.

The package works without the extension (a vectorized numpy fallback is
selected at import time), so a missing compiler or Cython only costs speed.
"""
from setuptools import setup

ext_modules = []
try:
    import numpy
    from setuptools import Extension
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "distillcert._fastsv",
                ["src/distillcert/_fastsv.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
