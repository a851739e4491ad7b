"""Exception hierarchy shared by all modules."""


class Pachner33Error(Exception):
    """Base class for all package-specific errors."""


class ComplexStructureError(Pachner33Error):
    """Simplex list does not define a usable oriented complex."""


class MovePreconditionError(Pachner33Error):
    """A requested 3->3 move is not admissible at the given triangle."""


class DegenerateSimplexError(Pachner33Error):
    """A 4-simplex image in R^4 is (numerically) degenerate."""


class NonRealizableLengthsError(Pachner33Error):
    """A squared-length table has no Euclidean realization."""


class SelectionError(Pachner33Error):
    """A submatrix selection is invalid or numerically degenerate."""


class SchemaError(Pachner33Error):
    """A complex document violates the JSON schema."""
