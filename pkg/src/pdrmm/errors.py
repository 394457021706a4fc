"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PdrmmError(Exception):
    exit_code = 1


class ParseError(PdrmmError, ValueError):
    """Malformed input row. ``line`` is 1-based."""

    exit_code = 1

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OrderingError(ParseError):
    pass


class EmptyInputError(ParseError):
    pass


class ConfigError(PdrmmError, ValueError):
    exit_code = 2


class ParameterError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class ScenarioError(ConfigError):
    pass


class RangeError(PdrmmError, ValueError):
    exit_code = 3


class EmptyTrajectoryError(PdrmmError, ValueError):
    exit_code = 3


class UndefinedRatioError(PdrmmError, ZeroDivisionError):
    exit_code = 3


class MismatchError(PdrmmError, ValueError):
    """Detected turn count differs from the route's interior corner count."""

    exit_code = 4

    def __init__(self, n_turns, n_corners):
        super().__init__(f"{n_turns} turns vs {n_corners} corners")
        self.n_turns = n_turns
        self.n_corners = n_corners


class DegenerateGeometryError(PdrmmError, ValueError):
    exit_code = 4
