class DomainError(ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` holds the dotted path of the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class WireFormatError(ValueError):
    pass
