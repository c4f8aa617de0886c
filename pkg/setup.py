#!/usr/bin/env python
"""The setup script."""
import os
import re

from setuptools import find_packages, setup


def get_version():
    """Get current version from code."""
    regex = r"__version__\s=\s\"(?P<version>[\d\.]+?)\""
    path = ("harmorph", "__version__.py")
    return re.search(regex, read(*path)).group("version")


def read(*parts):
    """Read file."""
    filename = os.path.join(os.path.abspath(os.path.dirname(__file__)), *parts)
    with open(filename, encoding="utf-8", mode="rt") as fp:
        return fp.read()


with open("README.md") as readme_file:
    readme = readme_file.read()

setup(
    author="The harmorph authors",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description="Harmonic morphisms and curvature on metric Lie algebras.",
    entry_points={"console_scripts": ["harmorph = harmorph.cli:main"]},
    include_package_data=True,
    install_requires=["attrs>=19.3.0", "numpy>=1.17.0", "scipy>=1.3.0"],
    keywords=["lie algebra", "harmonic morphism", "curvature", "solvable", "math"],
    license="MIT license",
    long_description_content_type="text/markdown",
    long_description=readme,
    name="harmorph",
    packages=find_packages(include=["harmorph"]),
    python_requires=">=3.8",
    test_suite="tests",
    version=get_version(),
    zip_safe=False,
)
