"""symplan: portable symbolic abstractions learned from option-execution data."""

__version__ = "0.1.0"
