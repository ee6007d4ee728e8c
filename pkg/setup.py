from setuptools import Extension, setup
from Cython.Build import cythonize

# optional=True: a failed compile leaves the pure-Python kernels in charge
extensions = [
    Extension(
        "transembed.kernels._fast",
        ["src/transembed/kernels/_fast.pyx"],
        extra_compile_args=["-O3"],
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
