class DomainMismatchError(ValueError):
    """Objects built over different domains, or an index outside the domain."""


class EmptyDatasetError(ValueError):
    pass


class SizeGuardError(ValueError):
    """Exact enumeration refused because it would be exponentially large."""


class ConfigError(ValueError):
    """Invalid experiment configuration; ``location`` names the field and line when known."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
