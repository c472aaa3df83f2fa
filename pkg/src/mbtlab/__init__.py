"""Model-based testing lab: synchronous EFSM models, test generation, coverage and mutation runs."""

__version__ = "0.1.0"
