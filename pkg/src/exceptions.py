"""
Exceptions du projet Subflow
"""


class SubflowError(Exception):
    """Base class for every error raised by the package"""


class ConfigError(SubflowError, ValueError):
    """Invalid run configuration or invalid operation inputs"""


class MeshMismatchError(SubflowError, ValueError):
    """Two fields combined in one operation live on different meshes"""


class AdmissibilityError(SubflowError, ValueError):
    """A reaction term violates the structural assumptions"""


class StabilityError(SubflowError, ValueError):
    """The explicit Lipschitz part would break the contraction (Δτ·K ≥ 1)"""


class ConvergenceError(SubflowError, RuntimeError):
    """Raised by callers that require a converged resolvent solve"""
