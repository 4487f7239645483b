from setuptools import setup

# Shim for tools that still call setup.py directly; graphhist's metadata,
# dependencies and the package location (apps/) are declared in pyproject.toml
setup()
