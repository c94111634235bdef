"""Exception hierarchy shared across the package."""


class AirholdError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(AirholdError):
    """Invalid graph structure or graph query (unknown node, empty graph, ...)."""


class SchemaError(AirholdError):
    """CSV header or file-level schema problem."""


class RowError(AirholdError):
    """A single record failed validation."""

    def __init__(self, row: int, field: str, message: str):
        super().__init__(f"row {row}, field '{field}': {message}")
        self.row = row
        self.field = field


class SplitError(AirholdError):
    """Stratified split cannot honor its guarantees."""


class ConvergenceError(AirholdError):
    """Iterative solver failed to reach tolerance within its budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class DivergenceError(AirholdError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


class ModelFormatError(AirholdError):
    """Model payload is corrupt or structurally wrong."""


class ModelVersionError(AirholdError):
    """Model payload has an unsupported version tag."""
