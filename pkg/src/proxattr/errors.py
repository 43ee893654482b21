"""Exception hierarchy.

Everything raised for bad *data* derives from :class:`ProxattrError`, which
the CLI maps to exit code 1.
"""


class ProxattrError(Exception):
    pass


class InvalidDelta(ProxattrError, ValueError):
    pass


class NoData(ProxattrError):
    pass


class GridMismatch(ProxattrError):
    pass


class UnknownSensor(ProxattrError, KeyError):
    def __str__(self):
        # KeyError would otherwise repr() the message
        return Exception.__str__(self)


class InfeasibleLayout(ProxattrError):
    pass


class ParseError(ProxattrError):
    """A row- or line-addressed input problem."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedRow(ParseError):
    pass


class NonFiniteCoordinate(ParseError):
    pass


class BadTimestamp(ParseError):
    pass


class ValueOutOfRange(ParseError):
    pass


class SchemaError(ProxattrError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        if self.path:
            message = f"{'/'.join(str(p) for p in self.path)}: {message}"
        super().__init__(message)


class DegreeOutOfRange(SchemaError):
    pass


class InvalidBox(SchemaError):
    pass
