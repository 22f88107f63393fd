"""Exception hierarchy shared by the whole package."""


class KnightError(Exception):
    """Base class for every error raised by ndknight."""


class InputError(KnightError, ValueError):
    """Malformed or out-of-range input."""


class DomainError(KnightError, ValueError):
    """Operation is undefined for the given board (e.g. diagonals of a cuboid)."""


class CapacityError(KnightError):
    """Board too large for a precomputed move table."""


class ParseError(InputError):
    """A tour file could not be parsed.

    ``line`` and ``column`` are 1-based and point at the offending token when
    known.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class HeaderError(ParseError):
    pass


class CellCountError(ParseError):
    pass


class DuplicateNumberError(ParseError):
    def __init__(self, message, first, second, line=None, column=None):
        self.first = first
        self.second = second
        super().__init__(message, line, column)


class NumberRangeError(ParseError):
    pass
