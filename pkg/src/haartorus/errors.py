"""Error taxonomy shared across the package."""


class InvalidInputError(ValueError):
    """A caller-supplied value violates a documented precondition."""


class ResourceLimitError(RuntimeError):
    """A request would exceed a documented size cap (for example dense bases)."""


class ParseError(ValueError):
    """Malformed JSON or CSV input; carries location context when known."""

    def __init__(self, message, path=None, line=None, field=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        prefix = ": ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.field = field


class GoldenMismatchError(RuntimeError):
    """A computed value deviates from its golden reference beyond tolerance."""
