""" Hetalign-specific exceptions. """


class HetalignError(Exception):
    """Base class of all hetalign errors."""


class InvalidGraph(HetalignError, ValueError):
    """Graph data violates an invariant, or a quantity is undefined on it."""


class InvalidSetting(HetalignError, ValueError):
    """Invalid setting or combination of settings."""


class ReconstructionError(HetalignError):
    """The multiplier search of the homophilic row solver failed.

    Attributes:
        row: Index of the failing row.
        residual: Distance of the row sum from 1 at the last iterate.
    """

    def __init__(self, message: str, *, row: int, residual: float):
        super().__init__(f"{message} (row {row}, residual {residual:.3e})")
        self.row = row
        self.residual = residual


class NumericalAbort(HetalignError, FloatingPointError):
    """A loss part or gradient became NaN or infinite.

    Attributes:
        name: The loss part or parameter where the non-finite value appeared.
    """

    def __init__(self, message: str, *, name: str):
        super().__init__(f"{message}: {name}")
        self.name = name


class DataError(HetalignError):
    """Input files cannot be parsed, or disagree with declared statistics."""

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        expected: object = None,
        actual: object = None,
    ):
        where = ""
        if path is not None:
            where = f" [{path}" + (f":{line}" if line is not None else "") + "]"
        what = ""
        if expected is not None or actual is not None:
            what = f" (expected {expected}, got {actual})"
        super().__init__(f"{message}{where}{what}")
        self.path = path
        self.line = line
        self.expected = expected
        self.actual = actual


class PipelineError(HetalignError):
    """A pipeline stage failed. The original error is chained as `__cause__`.

    Attributes:
        stage: Name of the failing stage.
    """

    def __init__(self, message: str, *, stage: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
