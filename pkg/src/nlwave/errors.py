"""Exception hierarchy shared across the package.

Every error carries a machine-readable ``code`` (the class name) and an
optional ``details`` payload so drivers can react without parsing messages.
"""
from __future__ import annotations


class NlwaveError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class ConfigError(NlwaveError):
    """Invalid run configuration; ``pointer`` is a JSON-pointer path."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer}: {message}", pointer=pointer)
        self.pointer = pointer


class PositivityViolation(NlwaveError):
    """Sampled kernel symbol is not strictly positive."""


class NonpositiveEpsilon(NlwaveError):
    """Kernel rescaling requires a strictly positive parameter."""


class MassNotOne(NlwaveError):
    """Operation requires a unit-mass kernel."""


class NegativeSymbol(NlwaveError):
    """Symbol value is negative where nonnegativity is required."""


class WidthUnresolvable(NlwaveError):
    """Mollifier width is below the grid resolution limit."""


class GridMismatch(NlwaveError):
    """Fields from different grids were combined."""


class HyperbolicityLost(NlwaveError):
    """The coefficient floor c1 + w >= d1 was violated."""


class NonFiniteValue(NlwaveError):
    """A state value became NaN or infinite (blow-up signal)."""


class BoundaryContamination(NlwaveError):
    """Wave amplitude at the domain edge exceeded the safety threshold."""


class ResolutionLost(NlwaveError):
    """Spectral tail mass exceeded the resolution threshold."""


class EnergyNotCoercive(NlwaveError):
    """Energy functional requested with c1 + min(w) <= 0."""


class ZeroField(NlwaveError):
    """Operation undefined for an identically zero field."""


class ProfileNotLocalized(NlwaveError):
    """Initial profile does not decay below tolerance at the domain edge."""


class NoContraction(NlwaveError):
    """Successive iteration differences stopped contracting."""


class InvalidEpsilon(NlwaveError):
    """Limit-study parameter out of range."""


class EnvelopeViolated(NlwaveError):
    """A fitted exponential error envelope failed at a smaller epsilon."""
