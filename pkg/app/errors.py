from typing import Optional, Sequence


class MdpcError(Exception):
    """Base class for every error raised by the analysis library."""


class MismatchedModulus(MdpcError, ValueError):
    def __init__(self, r_left: int, r_right: int):
        super().__init__(f"Polynomials live in different rings: r={r_left} vs r={r_right}")
        self.r_left = r_left
        self.r_right = r_right


class NotInvertible(MdpcError, ArithmeticError):
    pass


class IndexOutOfRange(MdpcError, IndexError):
    pass


class SameIndex(MdpcError, ValueError):
    pass


class WindowOutOfRange(MdpcError, ValueError):
    pass


class InvalidGrid(MdpcError, ValueError):
    pass


class DomainError(MdpcError, ValueError):
    pass


class ParameterError(MdpcError, ValueError):
    pass


class ConfigError(MdpcError, ValueError):
    pass


class LengthMismatch(MdpcError, ValueError):
    pass


class DegenerateSample(MdpcError, ValueError):
    pass


class OracleMismatch(MdpcError):
    def __init__(self, closed_form: int, oracle: int):
        super().__init__(f"Closed-form count {closed_form} disagrees with oracle count {oracle}")
        self.closed_form = closed_form
        self.oracle = oracle


class _FileProblem(MdpcError, ValueError):
    """Error tied to one or more lines of an input file."""

    def __init__(self, message: str, path: Optional[str] = None, lines: Sequence[int] = ()):
        self.path = path
        self.lines = list(lines)
        where = ""
        if path is not None:
            where = f"{path}: "
        if self.lines:
            where += f"line(s) {', '.join(map(str, self.lines))}: "
        super().__init__(f"{where}{message}")


class ParseError(_FileProblem):
    pass


class InvariantViolation(_FileProblem):
    pass
