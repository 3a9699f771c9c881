from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("ktraj.kernels._fast", ["src/ktraj/kernels/_fast.pyx"],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: the package falls back to ktraj.kernels._slow
    ext_modules = []

setup(ext_modules=ext_modules)
