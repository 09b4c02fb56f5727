"""Exception types raised by freeperc."""


class FreePercError(Exception):
    """Base class for all library errors."""


class PoleError(FreePercError, ZeroDivisionError):
    """A rational function was evaluated where its denominator vanishes."""


class EnumerationCapError(FreePercError):
    """An exhaustive enumeration would exceed the configured edge cap."""


class DisconnectedGraphError(FreePercError):
    """A finite Cayley graph is not connected."""


class GraphFormatError(FreePercError, ValueError):
    """An edge-list file could not be parsed or is not a valid Cayley graph."""


class NoConvergenceError(FreePercError):
    """A fixed-point iteration hit its iteration cap."""


class FixedPointNotFoundError(FreePercError):
    """No positive fixed point was found although p is above p_c."""


class SupercriticalRequestError(FreePercError, ValueError):
    """A subcritical-only quantity was requested at p >= p_c."""


class DegenerateProductError(FreePercError, ValueError):
    """The product is C2*C2 (or another product with p_c = 1)."""


class ParameterRangeError(FreePercError, ValueError):
    """Parameters lie outside the range where a bound is valid."""


class SpecParseError(FreePercError, ValueError):
    """A textual product specification could not be parsed."""

    def __init__(self, text, position, expected):
        self.text = text
        self.position = position
        self.expected = tuple(expected)
        super().__init__(
            f"cannot parse {text!r} at position {position}: "
            f"expected {' or '.join(self.expected)}"
        )
