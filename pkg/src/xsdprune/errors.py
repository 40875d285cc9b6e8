"""Exception hierarchy shared by every stage of the pipeline."""
from __future__ import annotations


class XsdPruneError(Exception):
    """Base class for all errors raised by xsdprune."""


class SchemaSetError(XsdPruneError):
    """Invalid manipulation of a schema set (bad signature, cycle, conflict)."""


class LoadError(XsdPruneError):
    """A schema document could not be loaded into the component model."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class AnalysisError(XsdPruneError):
    """An instance node could not be matched against the schema set."""

    def __init__(self, message: str, node_path: str | None = None, file: str | None = None):
        self.node_path = node_path
        self.file = file
        parts = [p for p in (file, node_path) if p]
        prefix = " ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmitError(XsdPruneError):
    """The retained set cannot be written out as valid schema documents."""
