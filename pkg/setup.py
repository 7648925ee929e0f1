from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    extensions = cythonize(
        [Extension("hgcsp._fastkern", ["src/hgcsp/_fastkern.pyx"], optional=True)],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
