"""Build script: compiles the sampling kernels, falling back to pure Python."""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Extension build that degrades to the pure-Python backend on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:   # pragma: no cover
            print(f"warning: compiled kernels unavailable ({exc}); "
                  "using the pure-Python backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:   # pragma: no cover
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "using the pure-Python backend")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:   # pragma: no cover
        return []
    return cythonize(
        [Extension("mosskit._kernels", ["src/mosskit/_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
