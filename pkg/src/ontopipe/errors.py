"""Exception hierarchy shared by all ontopipe modules."""


class OntopipeError(Exception):
    """Base class for every error raised by this package."""


class UnknownEntityError(OntopipeError, KeyError):
    """An entity id was looked up in a graph or store that does not contain it."""

    def __init__(self, entity_id: str):
        super().__init__(entity_id)
        self.entity_id = entity_id

    def __str__(self) -> str:
        return f"unknown entity id: {self.entity_id!r}"


class InvariantError(OntopipeError):
    """A structural invariant of the graph is violated (cycle, missing root path, ...)."""


class ParseError(OntopipeError):
    """An input file could not be parsed. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(OntopipeError):
    """Invalid configuration: bad seed ids, thresholds out of range, empty selections."""


class DataError(OntopipeError):
    """Inputs are syntactically fine but semantically unusable (empty gold set, ...)."""


class TrainingError(OntopipeError):
    """The classifier training set is degenerate (e.g. a single class)."""


class ServiceError(OntopipeError):
    """A remote embedding service misbehaved (non-200, bad dimension, timeout)."""
