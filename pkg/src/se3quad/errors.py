"""Exception types shared across the package."""


class NotSkewSymmetric(ValueError):
    """Matrix handed to vee() is not skew-symmetric within tolerance."""


class DegenerateMatrix(ValueError):
    """Matrix cannot be projected onto SO(3) (det <= 0 or rank-deficient)."""


class NotARotation(ValueError):
    """3x3 matrix fails the SO(3) invariants (orthogonality, unit determinant)."""


class SingularAllocation(ValueError):
    """Rotor geometry makes the 4x4 thrust allocation matrix singular."""


class DegenerateThrust(RuntimeError):
    """Commanded force vector vanished; the thrust axis is undefined."""


class HeadingParallel(RuntimeError):
    """Desired heading direction is parallel to the commanded thrust axis."""


class NumericalBlowup(RuntimeError):
    """A state component left the sane envelope during integration."""


class NonPositiveGain(ValueError):
    """A gain that must be strictly positive is not."""


class PsiOutOfRange(ValueError):
    """An attitude-error region parameter lies outside its admissible interval."""


class PsiOrdering(ValueError):
    """Region parameters violate the required ordering psi1 < 1 <= psi2 < 2."""


class TauOutOfRange(ValueError):
    """Robust-term exponent must be strictly greater than 2."""


class InitialAttitudeError(RuntimeError):
    """Initial attitude error is too large for the requested flight mode."""


class ConfigError(ValueError):
    """Scenario configuration could not be parsed into a valid scenario."""
