"""Build script: compiles the optional lexer extension when Cython is available.

The package works without the extension (pure-Python core is selected at
import time), so the build must never hard-fail on a missing compiler or
missing Cython.  Set ASSERTGEN_NO_EXTENSION=1 to skip the extension build.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ASSERTGEN_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/assertgen/_lexer_c.pyx"],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
