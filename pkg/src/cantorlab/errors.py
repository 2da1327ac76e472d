"""Exception vocabulary shared across the package."""


class DomainError(ValueError):
    """Input outside an operation's documented domain."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class DivergenceError(DomainError):
    """Series diverges at the requested point."""


class SingularityError(DomainError):
    """Evaluation point collides with an atom of the measure."""


class CollisionError(RuntimeError):
    """Supposedly distinct frequencies collided (rational input?)."""


class BudgetError(RuntimeError):
    """Request exceeds a documented size/memory budget."""


class QuadratureError(RuntimeError):
    """Quadrature failed its self-consistency (resolution) check."""


class AccuracyWarning(UserWarning):
    """Result returned, but outside the calibrated accuracy regime."""
