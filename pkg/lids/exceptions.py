"""Errors raised by the lids engine."""


class LidsError(Exception):
    """Base class for every engine error."""


class InvalidName(LidsError):
    """A resource URI was requested with an empty path segment."""


class TrigSyntaxError(LidsError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class PipelineParseError(LidsError):
    def __init__(self, pipeline_id, line, message=""):
        super().__init__(f"pipeline {pipeline_id} does not parse (line {line}) {message}".rstrip())
        self.pipeline_id = pipeline_id
        self.line = line


class DimensionError(LidsError):
    pass


class NotFound(LidsError):
    pass


class InvalidQuery(LidsError):
    pass


class CorpusIoError(LidsError):
    """A corpus directory or input file could not be read."""
