"""Exception types shared across the solver modules."""


class HybridGasError(Exception):
    """Base class for all solver errors."""


class ConfigError(HybridGasError):
    """Invalid or inconsistent run configuration."""


class DegenerateCell(HybridGasError):
    """Cell density at or below the positivity floor."""


class NonPositiveTemperature(HybridGasError):
    """Temperature moment came out non-positive."""


class NonSPDTensor(HybridGasError):
    """Relaxation tensor lost positive definiteness (beta too negative)."""


class NewtonDivergence(HybridGasError):
    """Moment-matching Newton iteration failed to converge."""


class CFLViolation(HybridGasError):
    """Time step exceeds the stability limit of an explicit update."""


class NegativePressure(HybridGasError):
    """Conserved state decodes to negative pressure."""


class ModelMismatch(HybridGasError):
    """Operation invoked with an incompatible closure (e.g. Burnett with beta != 0)."""


class ZoneTooNarrow(HybridGasError):
    """Regime zone narrower than the coupling stencil and not repairable."""


class AsymmetricGrid(HybridGasError):
    """Velocity grid is not symmetric under v -> -v; specular walls need node symmetry."""
