"""Modeling formalism and its synchronous execution."""
