"""
errors.py - Exception types raised by the library
G2 Variational Lab

Every library failure derives from G2LabError so the CLI and the API
blueprint can turn it into a failed Report / JSON error in one place.
"""


class G2LabError(ValueError):
    """Base class for all verification and computation failures."""


class InteriorProductError(G2LabError):
    pass


class FormLiteralError(G2LabError):
    pass


class NonDifferentiableFieldError(G2LabError):
    pass


class DegenerateMetricError(G2LabError):
    pass


class DegenerateFormError(G2LabError):
    pass


class MetricIterationError(G2LabError):
    """Fixed-point metric recovery did not settle."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class AutomorphismError(G2LabError):
    pass


class CartanInvolutionError(G2LabError):
    pass


class TypeLabelError(G2LabError):
    pass


class QuadratureError(G2LabError):
    pass


class OrbitViolationError(G2LabError):
    """A form left the open orbit at a sampled point."""

    def __init__(self, message: str, point=None):
        if point is not None:
            coords = ", ".join(f"{float(x):.6g}" for x in point)
            message = f"{message} at point ({coords})"
        super().__init__(message)
        self.point = None if point is None else tuple(float(x) for x in point)


class SupportError(G2LabError):
    pass


class AmplitudeSearchError(G2LabError):
    pass


class ClosednessError(G2LabError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class GlueError(G2LabError):
    def __init__(self, message: str, best: float, eta: float = None):
        super().__init__(f"{message} (best {best:.3e})")
        self.best = best
        self.eta = eta


class PackingError(G2LabError):
    pass


class CoverageError(G2LabError):
    def __init__(self, message: str, deficit: float):
        super().__init__(f"{message} (deficit {deficit:.6f})")
        self.deficit = deficit


class CoflowError(G2LabError):
    def __init__(self, message: str, node=None, suggested_dt: float = None):
        details = []
        if node is not None:
            details.append(f"node {node}")
        if suggested_dt is not None:
            details.append(f"try dt <= {suggested_dt:.3e}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.node = node
        self.suggested_dt = suggested_dt


class ConfigError(G2LabError):
    pass
