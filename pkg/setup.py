"""Builds the optional compiled kernel; without Cython or a compiler the
package still installs and runs on the pure-Python kernel."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DERIVPARSE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("derivparse._ckernel", ["src/derivparse/_ckernel.pyx"],
                       language="c++", extra_compile_args=["-O2", "-std=c++17"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
