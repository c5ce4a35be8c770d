"""Block encoding of matrix product operators and eigenvalue transformation circuits."""

__version__ = "0.1.0"
