"""Exception taxonomy shared across the package."""


class AlexotError(Exception):
    """Base class for all package errors."""


class ValidationError(AlexotError, ValueError):
    """Malformed input: bad coordinates, weights, descriptors, JSON payloads."""


class DegenerateInputError(AlexotError, ValueError):
    """Operation undefined on coincident or otherwise degenerate inputs."""


class SingularPointError(AlexotError, ValueError):
    """Tangent-space operation requested at a singular point (cone apex)."""


class ChartError(AlexotError, ValueError):
    """Local chart unavailable: singular center or radius too large."""


class DomainError(AlexotError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class SizeLimitError(AlexotError, ValueError):
    """Instance exceeds the size cap of an exhaustive routine."""


class NotDifferentiableError(AlexotError, ValueError):
    """Gradient requested where the potential is not differentiable."""
