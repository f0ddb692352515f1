"""Exception types raised across the package."""


class VdwOtocError(Exception):
    """Base class for all package-specific errors."""


class DomainError(VdwOtocError, ValueError):
    """A radius (or interval) lies outside a model's valid domain."""


class ArgumentError(VdwOtocError, ValueError):
    """An argument violates a documented precondition."""


class NoMinimumError(VdwOtocError):
    """The potential has no interior minimum (e.g. inverted harmonic)."""


class NoRootError(VdwOtocError):
    """V(r) = E has no root for the requested energy."""


class BracketError(VdwOtocError):
    """A sign-change bracket could not be established inside the domain."""


class NoInflectionError(VdwOtocError):
    """The second derivative does not change sign inside the domain."""


class ParseError(VdwOtocError, ValueError):
    """A tabulated-potential stream contains a malformed line."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class OrderError(ParseError):
    """Radii in a tabulated-potential stream are not strictly increasing."""


class TooFewPointsError(ParseError):
    """A tabulated-potential stream has fewer than four data rows."""


class NoBoundStatesError(VdwOtocError):
    """Diagonalization produced no eigenvalue below the threshold."""


class TruncationError(VdwOtocError):
    """The requested state sum truncation cannot represent the state."""


class CurvatureZeroError(VdwOtocError):
    """Quadratic expansion is degenerate: V'' vanishes at the turning point."""


class DerivativeZeroError(VdwOtocError):
    """V' vanishes at the turning point (energy at the potential minimum)."""


class NoWindowError(VdwOtocError):
    """No exponential-growth window qualifies; the dynamics look regular."""


class DegenerateFitError(VdwOtocError):
    """Too few usable points to fit an exponential."""


class ConfigError(VdwOtocError, ValueError):
    """A run configuration is invalid; `field` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
