"""Exception hierarchy shared by all modules."""


class ZeroSetError(ValueError):
    """Base class for invalid inputs to the zero-set machinery."""


class ContainsOriginError(ZeroSetError):
    pass


class NonFiniteError(ZeroSetError):
    pass


class NonMonotoneWeightError(ZeroSetError):
    pass


class ZeroRealPartError(ZeroSetError):
    pass


class OverlapError(ZeroSetError):
    pass


class EmptyClusterError(ZeroSetError):
    pass


class CoverageError(ZeroSetError):
    """Requested evaluation or range lies beyond what the finite prefix covers."""


class NonConvergenceError(ArithmeticError):
    pass


class ParseError(ZeroSetError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class ConfigError(ZeroSetError):
    pass
