class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class CostGuardError(DomainError):
    """Input size exceeds the guard of an exponential-cost routine."""


class ScalarModeError(TypeError):
    """Exact and floating scalars were mixed in one computation."""


class MetricError(ValueError):
    """Chart metric is not symmetric positive definite, or a stencil leaves the domain."""


class ConfigError(ValueError):
    """Unusable run configuration, such as an unknown model name or a bad parameter."""
