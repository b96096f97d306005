"""Exception hierarchy shared across the toolkit."""


class CuralogError(Exception):
    """Base class for all toolkit errors."""


class IngestError(CuralogError):
    """Fatal problem while reading a corpus source."""


class DuplicateTicketError(IngestError):
    def __init__(self, ticket_id: str, first_line: int, second_line: int):
        super().__init__(
            f"duplicate ticket_id {ticket_id!r} at lines {first_line} and {second_line}"
        )
        self.ticket_id = ticket_id
        self.first_line = first_line
        self.second_line = second_line


class ValidationError(CuralogError):
    """Input violates a documented precondition or invariant."""


class FeatureSpaceMismatch(CuralogError):
    """Model fingerprint does not match the feature configuration of the input."""

    def __init__(self, expected: str, got: str):
        super().__init__(f"feature space mismatch: model={expected} input={got}")
        self.expected = expected
        self.got = got


class ModelFormatError(CuralogError):
    """Model file is corrupt, truncated, or has an unsupported version/variant."""
