"""Exception types shared across the solver suite."""


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


class ConvergenceError(RuntimeError):
    """Newton iteration did not reach the requested residual tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class JacobianSingularError(RuntimeError):
    """Newton Jacobian was numerically singular (typically near a bifurcation)."""


class LostVortexError(RuntimeError):
    """No vortex core found: density minimum is filled in or outside the cloud."""


class AmplitudeTooSmallError(RuntimeError):
    """Phase loop crosses a near-node region away from the intended core."""


class BlowUpError(RuntimeError):
    """Propagation produced non-finite values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
