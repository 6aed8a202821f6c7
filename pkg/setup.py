import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = [
    Extension(
        "shapbn._kernels",
        ["src/shapbn/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
    )
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
