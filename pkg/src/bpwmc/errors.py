class BpwError(Exception):
    """Base class for library errors."""


class ParseError(BpwError, ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DomainError(BpwError, ValueError):
    """An input violates an operation's precondition."""


class ResourceError(BpwError):
    """A desk-scale cap (enumeration, matrix size, ...) was exceeded."""


class NumericError(BpwError, ArithmeticError):
    pass


class DecodeError(BpwError):
    """A (transition, encoding, remembered set) tuple occurs on no canonical path."""


class CertificationError(BpwError):
    """An exact check that should hold did not."""
