from setuptools import Extension, setup

# The compiled kernel is optional: when Cython (or a C compiler) is missing,
# the package falls back to the numpy implementation at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "destake._kernels._pivot_c",
                ["src/destake/_kernels/_pivot_c.pyx"],
                # No -ffast-math: the kernel must stay bit-identical with the
                # pure numpy twin (same addition order, no FP reassociation).
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
