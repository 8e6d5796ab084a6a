"""
Typed errors raised by gqcrb. The CLI maps every GqcrbError to exit code 2 and
prints the class name, so keep the names stable.
"""


class GqcrbError(Exception):
    """Base class for all gqcrb errors."""


class DomainError(GqcrbError, ValueError):
    """A parameter, mode index, or state is outside its valid domain."""


class ClosedFormUndefinedError(DomainError):
    """A closed-form reference expression is singular at this parameter point."""


class NumericalFailureError(GqcrbError):
    """A LAPACK routine did not converge, or a result lost the accuracy it needs."""


class InternalConsistencyError(GqcrbError):
    """A computed object violates an invariant that should hold analytically."""


class DivergingSensitivityError(GqcrbError):
    """The signal slope of a measurement vanishes, so the error propagation diverges."""


class RldOracleUndefinedError(GqcrbError):
    """The Fock density matrix is rank deficient, so the RLD does not exist."""


class InconsistentSystemError(GqcrbError):
    """
    The Stein equation has no solution to within tolerance.

    Parameters
    ----------
    residual: float
        The relative residual of the least-squares solution.
    """

    def __init__(self, residual, message=None):
        self.residual = residual
        if message is None:
            message = f'Stein equation residual {residual:.3e} is above tolerance.'
        super().__init__(message)


class RldUndefinedError(GqcrbError):
    """
    Sigma_minus is singular (the state is pure or nearly pure) so the RLD is undefined.

    Parameters
    ----------
    condition_number: float
        The condition number of Sigma_minus.
    """

    def __init__(self, condition_number, message=None):
        self.condition_number = condition_number
        if message is None:
            message = (
                f'Sigma_minus has condition number {condition_number:.3e}; '
                f'the RLD is undefined for (nearly) pure states.'
            )
        super().__init__(message)


class UnidentifiableParametersError(GqcrbError):
    """
    The QFI matrix is singular, so some combination of parameters carries no information.

    Parameters
    ----------
    direction: np.ndarray
        Unit vector in parameter space spanning the (numerical) null space.
    """

    def __init__(self, direction, message=None):
        self.direction = direction
        if message is None:
            message = f'QFI matrix is singular along the parameter direction {direction}.'
        super().__init__(message)


class IncreaseCutoffError(GqcrbError):
    """
    The truncated Fock state lost more weight than the truncation budget allows.

    Parameters
    ----------
    deficit: float
        1 - Tr(rho) after projecting onto the cutoff.
    """

    def __init__(self, deficit, message=None):
        self.deficit = deficit
        if message is None:
            message = f'Trace deficit {deficit:.3e} exceeds the truncation budget. Increase D.'
        super().__init__(message)
