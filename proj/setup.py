from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup
from glob import glob

ext = Pybind11Extension(
    "twentyq._core",
    sorted(glob("src/*.cpp")) + ["python/bindings.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
