"""entropylab test suite."""
