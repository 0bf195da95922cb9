"""Exact verification engine for a family of Ricci-flat pseudo-Kähler symmetric spaces."""

__version__ = "0.1.0"
