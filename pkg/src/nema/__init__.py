"""Instance-based matching of related fields across relational tables."""

__version__ = "0.1.0"
