class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class NumericalError(ArithmeticError):
    """A cost or gradient evaluated to a non-finite value."""


class QasmError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)


class NoSolutionError(RuntimeError):
    """Synthesis exhausted its search space; ``best`` holds the closest node found."""

    def __init__(self, msg: str, best=None):
        super().__init__(msg)
        self.best = best
