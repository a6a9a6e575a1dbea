"""Self-dual codes over characteristic-2 rings and their binary Gray images."""

__version__ = "0.1.0"
