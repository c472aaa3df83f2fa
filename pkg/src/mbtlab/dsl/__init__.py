"""Concrete syntax for models, suites and specifications."""
