from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the compiled kernels must be bit-identical to the pure
# Python fallback, so FMA contraction is disabled.  Do not add -ffast-math.
extensions = [
    Extension(
        "toppmap._kernels",
        ["src/toppmap/_kernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
