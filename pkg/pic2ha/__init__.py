"""Homological algebra of symmetric 2-groups (Picard groupoids) over the integers."""

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "complexes",
    "derived",
    "errors",
    "pic2core",
    "relkc",
    "resolve",
    "zlin",
]
