"""Running tests against a system under test through an adapter."""
