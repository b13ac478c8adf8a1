"""Jet differentials, holomorphic Morse inequalities and Monte-Carlo tower estimates."""

from .errors import DomainError

__version__ = "0.1.0"

__all__ = ["DomainError", "__version__"]
