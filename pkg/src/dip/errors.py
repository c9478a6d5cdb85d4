"""Exception hierarchy.

``DipError`` subclasses other than ``LLMError`` signal bad input data or
files; ``LLMError`` signals provider or transport failures. The CLI maps the
two families to different exit codes.
"""


class DipError(Exception):
    """Base class for all errors raised by this package."""


class DataError(DipError, ValueError):
    """Malformed or inconsistent input data."""


class LexiconFormatError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateEntryError(DataError):
    def __init__(self, key, line=None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate lexicon key {key!r}{where}")


class UnbalancedParenthesisError(DataError):
    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} at byte offset {offset}"
        super().__init__(message)


class MissingDictionaryLineError(DataError):
    pass


class EmptyEntryError(DataError):
    pass


class SchemaError(DataError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if field is not None:
            parts.append(f"field {field!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class PromptError(DataError):
    pass


class MissingLexiconError(PromptError):
    pass


class UnknownLanguageError(PromptError):
    pass


class MetricError(DataError):
    pass


class RaggedGridError(DataError):
    pass


class ConfigError(DataError):
    pass


class LLMError(DipError):
    """A completion could not be obtained."""


class TransportError(LLMError):
    def __init__(self, message, attempts):
        self.attempts = attempts
        super().__init__(f"{message} (after {attempts} attempts)")


class ProviderError(LLMError):
    def __init__(self, status, detail):
        self.status = status
        self.detail = detail
        super().__init__(f"provider returned HTTP {status}: {detail}")


class ReplayMissError(LLMError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"replay store has no response for key {key}")


class ItemRunError(LLMError):
    """A provider failure annotated with the run-matrix cell that triggered it."""

    def __init__(self, item_id, strategy, cause):
        self.item_id = item_id
        self.strategy = strategy
        self.cause = cause
        super().__init__(f"item {item_id!r}, strategy {strategy}: {cause}")
