"""Exception hierarchy shared by every fitting and diagnostics routine."""


class SparsePCAError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SparsePCAError, ValueError):
    """Input values violate a precondition (non-finite entries, negative threshold, ...)."""


class ShapeError(SparsePCAError, ValueError):
    """Array shapes do not conform."""


class DegenerateComponent(SparsePCAError):
    """A loading or score column collapsed to zero.

    Attributes
    ----------
    component : int or None
        Zero-based index of the offending component, when known.
    """

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class RankExhausted(SparsePCAError):
    """No candidate direction carries any remaining variance."""

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class ParseError(SparsePCAError, ValueError):
    """Malformed matrix file; ``row``/``column`` locate the first bad cell (1-based)."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class MissingData(SparsePCAError, KeyError):
    """Records needed for a table are absent."""

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"missing methods: {', '.join(self.missing)}")

    def __str__(self):
        return self.args[0]
