class DomainError(ValueError):
    """Raised for inputs that violate an operation's preconditions."""
