"""Exception and warning types shared across the library."""


class InvalidInputError(ValueError):
    """Input data is malformed (non-finite entries, wrong shapes)."""


class DimensionMismatchError(InvalidInputError):
    """Objects built over different groups or spaces were combined."""


class MembershipError(ValueError):
    """A matrix fails the group membership test."""


class ClosureViolationError(ValueError):
    """A matrix expected to lie in the algebra span does not.

    Usually signals inconsistent user-supplied group data.
    """


class EquivarianceFailureError(ValueError):
    """A construction that must be equivariant fails its check."""


class ContractViolationError(ValueError):
    """A declared symmetry contract (invariance/equivariance) does not hold."""


class SingularPointError(ValueError):
    """The action is not locally free at the given point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class BlowUpError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message, last_valid_time=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time


class TrajectoryEscapeError(RuntimeError):
    """A trajectory left the configured domain."""

    def __init__(self, message, escape_time=None):
        super().__init__(message)
        self.escape_time = escape_time


class NoConvergenceError(RuntimeError):
    """Newton iteration failed to reach the tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegeneratePointError(RuntimeError):
    """Newton Jacobian is effectively singular at the current iterate."""


class SliceBoundaryError(ValueError):
    """Point is too far from the slice base for the local solves."""


class NoOverlapError(RuntimeError):
    """Slice transition did not converge (slices too different, or point too far out)."""


class UnreliableDerivativeError(RuntimeError):
    """Finite-difference derivative failed its internal consistency check."""


class NotEquilibriumError(ValueError):
    """Linearization requested at a point that is not an equilibrium."""


class TheoremViolationError(RuntimeError):
    """A certified identity failed downstream (signals a broken witness)."""


class InsufficientQuadratureError(ValueError):
    """No exact averaging rule is available for the requested group/degree."""


class AssemblyError(RuntimeError):
    """Matrix assembly produced inconsistent dimensions or residuals."""


class BudgetError(ValueError):
    """Polynomial degree budget exceeded."""


class InvalidSplittingError(ValueError):
    """Proposed complement is not complementary to the stabilizer algebra."""


class NoInvariantMetricError(RuntimeError):
    """Group averaging failed to produce an invariant inner product."""


class ScenarioFormatError(ValueError):
    """Scenario file failed to parse or validate against the schema."""


class IllConditionedStabilizerWarning(UserWarning):
    """Stabilizer-rank decision was close to the singular-value threshold."""


class PairingAmbiguityWarning(UserWarning):
    """Eigenvalue clusters could not be paired unambiguously by real part."""
