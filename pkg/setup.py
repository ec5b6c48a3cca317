import os

from setuptools import setup

ext_modules = []
if os.environ.get("TUMORDG_NO_EXT", "0") in ("", "0"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("tumordg._kernels", ["src/tumordg/_kernels.pyx"],
                       include_dirs=[numpy.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # numpy fallback in tumordg._kernels_py is used at runtime
        ext_modules = []

setup(ext_modules=ext_modules)
