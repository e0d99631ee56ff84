"""Exception types shared across the package."""


class CavityLatticeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CavityLatticeError, ValueError):
    """An argument violates a documented precondition."""


class ConvergenceError(CavityLatticeError):
    """An iterative construction failed to reach its tolerance.

    Carries the residual that was actually achieved.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


class SingularBlockError(CavityLatticeError):
    """A steady-state block solve hit a singular matrix.

    ``block`` names the offending excitation block ("n=1" or "n=2").
    """

    def __init__(self, block: str, message: str = ""):
        super().__init__(f"singular {block} block{': ' + message if message else ''}")
        self.block = block


class DegenerateCollapseError(CavityLatticeError):
    """A collapse operator annihilated the state (zero-norm collapse)."""


class DegenerateDenominatorError(CavityLatticeError):
    """A correlation denominator vanished (no steady-state signal in that channel)."""


class DegenerateSteadyStateError(CavityLatticeError):
    """The Liouvillian null space is not one-dimensional."""


class ConfigError(CavityLatticeError):
    """A run configuration failed validation."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)
