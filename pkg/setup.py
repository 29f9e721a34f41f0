"""Build script: compiles the optional matcher kernel extension.

The package is fully functional without the extension (a pure-Python
twin of the kernel is selected at import time), so any failure to
cythonize or compile is non-fatal.
"""

from setuptools import setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        ["src/opequiv/_matchcore.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"skipping compiled kernel ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=extensions)
