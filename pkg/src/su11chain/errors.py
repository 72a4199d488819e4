"""Exception hierarchy shared by every module of the package."""


class Su11Error(Exception):
    """Base class for all package errors."""


class DomainError(Su11Error, ValueError):
    """Argument outside the domain of a special function."""


class PoleError(Su11Error, ValueError):
    """Evaluation requested at (or within the guard radius of) a lattice pole."""

    def __init__(self, x):
        super().__init__(f"pole of the Weierstrass function at x={x!r}")
        self.x = x


class NonMonotoneDispersion(Su11Error):
    """The dispersion relation is not strictly increasing on (0, pi)."""


class ExpansionOrderUndetected(Su11Error):
    """No derivative up to the maximal order exceeds the detection threshold."""


class DegenerateGroundState(Su11Error):
    """A single-particle level coincides with the chemical potential."""

    def __init__(self, mode, gap=None):
        msg = f"mode l={mode} sits at the chemical potential"
        if gap is not None:
            msg += f" (|eps - lambda| = {gap:.3e})"
        super().__init__(msg)
        self.mode = mode
        self.gap = gap


class QuadratureNonConvergence(Su11Error):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, achieved, requested, detail=""):
        super().__init__(
            f"quadrature error estimate {achieved:.3e} exceeds tolerance "
            f"{requested:.3e}{': ' + detail if detail else ''}"
        )
        self.achieved = achieved
        self.requested = requested


class EigensolverFailure(Su11Error):
    """Eigendecomposition failed or produced eigenvalues outside [0, 1]."""

    def __init__(self, message, *, condition=None, bad_values=None):
        if condition is not None:
            message += f" (condition estimate {condition:.3e})"
        super().__init__(message)
        self.condition = condition
        self.bad_values = bad_values


class ClassificationAmbiguous(Su11Error):
    """The extremum structure of n_f(T) could not be classified reliably."""


class SizeCapExceeded(Su11Error):
    """Dense exact diagonalization requested beyond the supported size."""


class OracleMismatch(Su11Error):
    """Two independent routes to the same quantity disagree."""

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst
