"""Logging and run-artifact helpers; import from the submodules."""
