class DomainError(ValueError):
    """Raised when inputs fall outside the mathematical domain of an operation."""
