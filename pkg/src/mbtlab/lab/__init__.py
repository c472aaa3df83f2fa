"""Experiment orchestration and statistics."""
