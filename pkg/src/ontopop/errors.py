"""Exception hierarchy.

Exit-code mapping for the CLI: ConfigError (and argparse failures) exit 2,
every other OntopopError exits 1.
"""


class OntopopError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(OntopopError):
    """A file does not conform to its declared on-disk format."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class OntologyError(OntopopError):
    """Ontology data violates a structural invariant (cycle, duplicate id, ...)."""


class TaxonomyError(OntopopError):
    """Taxonomy data violates a structural invariant (dangling edge, cycle)."""


class DegenerateVectorError(OntopopError, ValueError):
    """A zero vector reached an operation undefined for zero vectors."""


class DerivationError(OntopopError):
    """A class vector could not be derived (e.g. every seed is out of vocabulary)."""


class ConfigError(OntopopError):
    """Unusable run configuration; the caller must intervene."""
