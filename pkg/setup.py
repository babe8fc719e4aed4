#!/usr/bin/env python3
"""
Setup script for tracesig.
"""

import os
import re
from setuptools import setup, find_packages

# Extract version from package __init__.py
def get_version():
    init_path = os.path.join("tracesig", "__init__.py")
    if not os.path.isfile(init_path):
        return "0.1.0"
    with open(init_path, "r") as f:
        version_match = re.search(r'__version__\s*=\s*["\']([^"\']+)["\']', f.read())
    if version_match:
        return version_match.group(1)
    return "0.1.0"

# Read long description from README
def get_long_description():
    if os.path.isfile("README.md"):
        with open("README.md", "r") as f:
            return f.read()
    return "Traceable group signatures from lattices"

setup(
    name="tracesig",
    version=get_version(),
    description="Traceable group signatures from lattices",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy>=1.22.0",
        "sympy>=1.10",
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0.0",
        "toml>=0.10.2",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "scipy>=1.8.0",
            "pylint>=2.13.0",
            "black>=22.1.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "tracesig=tracesig.cli.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Security :: Cryptography",
    ],
    python_requires=">=3.9",
)
