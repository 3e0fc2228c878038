"""Exception hierarchy shared by all solvers.

Validation problems derive from :class:`ValidationError` (and ``ValueError``)
so callers that only care about "bad input" can catch one class. The CLI maps
the families onto exit codes: validation 2, resource cap 3, infeasible 4.
"""


class QdetError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(QdetError, ValueError):
    """Input data violates a documented invariant."""


class NotHermitianError(ValidationError):
    def __init__(self, asymmetry):
        self.asymmetry = float(asymmetry)
        super().__init__(f"matrix is not Hermitian (max |A - A^dagger| = {self.asymmetry:.3g})")


class DimMismatchError(ValidationError):
    pass


class NotPositiveError(ValidationError):
    def __init__(self, index, min_eigenvalue):
        self.index = index
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"POVM element {index} is not positive semidefinite "
            f"(smallest eigenvalue {self.min_eigenvalue:.9g})"
        )


class NotCompleteError(ValidationError):
    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"POVM elements do not sum to the identity (max residual {self.residual:.3g})")


class InvalidEnsembleError(ValidationError):
    pass


class NotCommutingError(ValidationError):
    def __init__(self, i, j, norm):
        self.i, self.j, self.norm = i, j, float(norm)
        super().__init__(f"POVM elements {i} and {j} do not commute (max |[E_i, E_j]| = {self.norm:.3g})")


class NotCovariantError(ValidationError):
    pass


class NotIrreducibleError(ValidationError):
    pass


class CapExceededError(QdetError):
    """An exact enumeration would exceed the configured budget."""

    def __init__(self, count, cap, what="groupings", formula=None):
        self.count = int(count)
        self.cap = int(cap)
        hint = "use a coarser resolution" if what == "grid cells" else "reduce the number of messages or measurement outcomes"
        size = f"{formula} = {self.count}" if formula else str(self.count)
        super().__init__(f"{what}: {size} exceeds the cap {self.cap}; {hint}")


class InfeasibleError(QdetError):
    """No non-trivial unambiguous strategy exists."""


class EigenConvergenceError(QdetError, ArithmeticError):
    def __init__(self, residual, sweeps):
        self.residual = float(residual)
        self.sweeps = sweeps
        super().__init__(f"Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3g})")
