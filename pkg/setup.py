#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
#
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
import os

from setuptools import setup

with open("./README.md", encoding="utf-8") as f:
    long_description = f.read()

# Package dependency control (developers & package managers)
#   HADAMARDLAB_TESTS: also install the test requirements
#   HADAMARDLAB_VERSION_SUFFIX: PEP-440 local suffix, e.g. ".dev1"
HadamardLab_tests = os.environ.get("HADAMARDLAB_TESTS", "OFF")
HadamardLab_version_suffix = os.environ.get("HADAMARDLAB_VERSION_SUFFIX", "")

if HadamardLab_tests.upper() in ["1", "ON", "TRUE", "YES"]:
    HadamardLab_tests = "ON"
else:
    HadamardLab_tests = "OFF"

# Get the package requirements from the requirements.txt file
install_requires = []
with open("./requirements.txt") as f:
    install_requires = [line.strip("\n") for line in f.readlines() if line.strip()]
with open("./tests/python/requirements.txt") as t:
    tests_require = [line.strip("\n") for line in t.readlines() if line.strip()]
if HadamardLab_tests == "ON":
    install_requires += tests_require

# keyword reference:
#   https://packaging.python.org/guides/distributing-packages-using-setuptools
setup(
    name="hadamardlab",
    # note PEP-440 syntax: x.y.zaN but x.y.z.devN
    version="25.01" + HadamardLab_version_suffix,
    packages=["hadamardlab", "hadamardlab.lab"],
    # Python sources:
    package_dir={"": "src/python"},
    author="hadamardlab contributors",
    description="hadamardlab: numerical experiments on Busemann functions in Hadamard model spaces",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=(
        "geometry hadamard-spaces busemann-functions hyperbolic-space tits-boundary lattices"
    ),
    zip_safe=False,
    python_requires=">=3.9",
    tests_require=tests_require,
    install_requires=install_requires,
    classifiers=[
        "Development Status :: 4 - Beta",
        "Natural Language :: English",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        ("License :: OSI Approved :: " "BSD License"),
    ],
    license="BSD-3-Clause",
    license_files=["LICENSE.txt"],
    entry_points={
        "console_scripts": [
            "lab=hadamardlab.lab.__main__:main",
        ],
    },
)
