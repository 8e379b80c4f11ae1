# This file is part of bose-sdp-core
# SPDX-License-Identifier: BSD-2-Clause
"exceptions contains all custom exceptions that can be raised by bose_core"


class NotHermitian(ValueError):
    """
    Raised when a matrix differs from its conjugate transpose by more than the
    symmetrization tolerance
    """

    def __init__(self, residual: float, tolerance: float) -> None:
        self.residual: float = residual
        "The max-norm of A - A^dagger before averaging"

        self.tolerance: float = tolerance
        "The tolerance that was exceeded"

        self.msg: str = (
            f"Matrix is not Hermitian: residual {residual:.3e} exceeds {tolerance:.3e}"
        )
        "A message to display"

        ValueError.__init__(self, self.msg)


class DimensionMismatch(ValueError):
    """
    Raised when operands do not share a dimension
    """

    def __init__(self, what: str, expected: int, actual: int) -> None:
        self.what: str = what
        "What was compared"

        self.expected: int = expected
        "The expected dimension"

        self.actual: int = actual
        "The dimension that was found"

        super().__init__(f"{what}: expected dimension {expected}, got {actual}")


class SpectralDomainError(ValueError):
    """
    Raised by :func:`~bose_core.linalg.spectral_apply` when the scalar function
    is not finite on some eigenvalue
    """

    def __init__(self, eigenvalue: float, value: float) -> None:
        self.eigenvalue: float = eigenvalue
        "The offending eigenvalue"

        self.value: float = value
        "What the function returned there"

        super().__init__(
            f"Function is not finite at eigenvalue {eigenvalue!r} (got {value!r})"
        )


class NotPositiveSemidefinite(ValueError):
    """
    Raised when a nominally PSD matrix has an eigenvalue below the clip tolerance
    """

    def __init__(self, min_eigenvalue: float, tolerance: float) -> None:
        self.min_eigenvalue: float = min_eigenvalue
        "The most negative eigenvalue"

        self.tolerance: float = tolerance
        "The clip tolerance"

        super().__init__(
            f"Matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} "
            f"below -{tolerance:.3e}"
        )


class InvalidDensityMatrix(ValueError):
    """
    Raised when a state passed to a circuit simulator is not a density matrix
    """

    def __init__(self, reason: str) -> None:
        self.reason: str = reason
        "Why the matrix was rejected"

        super().__init__(f"Invalid density matrix: {reason}")


class ZeroOperator(ValueError):
    """
    Raised by :func:`~bose_core.sdp.decompose_state_model` for the zero matrix
    """

    def __init__(self) -> None:
        super().__init__("The zero operator has no linear-combination-of-states form")


class InvalidSchedule(ValueError):
    """
    Raised when a temperature schedule cannot produce a temperature
    """

    def __init__(self, mode: str, message: str) -> None:
        self.mode: str = mode
        "The schedule mode"

        super().__init__(f"{mode} schedule: {message}")


class InstanceValidationError(ValueError):
    """
    Raised when an instance or run configuration fails validation; ``field``
    names the offending entry
    """

    def __init__(self, field: str, message: str) -> None:
        self.field: str = field
        "The field that failed"

        self.message: str = message
        "A message to display"

        super().__init__(f"{field}: {message}")


class SolverError(Exception):
    """
    Base class for numerical failures of the solvers and estimators
    """

    def __init__(self, code: str, message: str) -> None:
        self.code: str = code
        "A Code to specify the Error"

        self.message: str = message
        "A Message to display"

        super().__init__(message)


class DualInfeasible(SolverError):
    """
    Raised when the dual slack operator is not strictly positive definite, so
    the thermal operator would condense into the ground state
    """

    def __init__(self, lambda_min: float) -> None:
        self.lambda_min: float = lambda_min
        "The minimum eigenvalue of the slack operator"

        super().__init__(
            "DualInfeasible",
            f"Ground-state condensation: lambda_min(K) = {lambda_min:.3e} is not > 0",
        )


class EmptyDualInterior(SolverError):
    """
    Raised by :func:`~bose_core.sdp.find_strictly_feasible` when no strictly
    feasible dual point was found
    """

    def __init__(self, iterations: int, best_lambda_min: float) -> None:
        self.iterations: int = iterations
        "How many subgradient steps were taken"

        self.best_lambda_min: float = best_lambda_min
        "The best minimum eigenvalue reached"

        super().__init__(
            "EmptyDualInterior",
            f"Dual has empty interior: best lambda_min {best_lambda_min:.3e} "
            f"after {iterations} iterations",
        )


class DualUnbounded(SolverError):
    """
    Raised by the reference oracle when the dual objective grows without bound
    """

    def __init__(self, value: float) -> None:
        self.value: float = value
        "The objective value when the search was stopped"

        super().__init__("DualUnbounded", f"Dual objective unbounded (reached {value:.3e})")


class StepUnderflow(SolverError):
    """
    Raised when feasibility backtracking cannot find a step that keeps
    lambda_min(K) above the safeguard floor
    """

    def __init__(self, halvings: int, floor: float) -> None:
        self.halvings: int = halvings
        "The number of halvings performed"

        self.floor: float = floor
        "The safeguard floor"

        super().__init__(
            "StepUnderflow",
            f"No feasible step after {halvings} halvings (floor {floor:.3e})",
        )


class SingularHessian(SolverError):
    """
    Raised when the Newton system stays singular after the Tikhonov shift
    """

    def __init__(self, shift: float) -> None:
        self.shift: float = shift
        "The shift that was applied"

        super().__init__("SingularHessian", f"Hessian singular after shift {shift:.3e}")


class BudgetInfeasible(SolverError):
    """
    Raised by :func:`~bose_core.qsim.plan_budget` when the series depth explodes
    """

    def __init__(self, depth: float, limit: int) -> None:
        self.depth: float = depth
        "The series depth that was requested"

        self.limit: int = limit
        "The largest depth that is accepted"

        super().__init__(
            "BudgetInfeasible",
            f"Truncation depth M = {depth:.6g} exceeds limit {limit}",
        )
