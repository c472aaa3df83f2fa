"""Test generation by bounded set-based exploration."""
