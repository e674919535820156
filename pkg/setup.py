import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SWIBAL_NO_EXT"):
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/swibal/_kernels/_fast.pyx",
        language_level=3,
        compiler_directives={"embedsignature": True},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))

setup(ext_modules=ext_modules)
