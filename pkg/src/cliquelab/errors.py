"""Exception hierarchy shared by every module of the lab."""


class LabError(ValueError):
    """Base class for all argument and data errors raised by cliquelab."""


class GraphError(LabError):
    """Malformed graph input (self-loop, duplicate edge, bad label)."""


class DensityUndefinedError(LabError):
    pass


class PenaltyConfigError(LabError):
    pass


class DimensionError(LabError):
    pass


class DomainError(LabError):
    pass


class SizeLimitError(LabError):
    pass


class EmbeddingLimitError(LabError):
    """Model has more variables than the annealer client can embed."""


class RatioUndefinedError(LabError):
    pass


class DegenerateDataError(LabError):
    pass


class UnsupportedDesignError(LabError):
    pass


class UnsupportedSizeError(LabError):
    pass


class PlanValidationError(LabError):
    pass
