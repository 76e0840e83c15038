"""Exception types raised across the package."""


class WiretapOTError(Exception):
    """Base class for all package errors."""


class ProvisioningError(WiretapOTError):
    """Bob could not build his index sets (the J = 0 event)."""


class InsufficientErasures(ProvisioningError):
    pass


class InsufficientUnerasures(ProvisioningError):
    pass


class DimensionError(WiretapOTError, ValueError):
    pass


class LengthMismatch(WiretapOTError, ValueError):
    pass


class DimensionMismatch(WiretapOTError, ValueError):
    pass


class TooLarge(WiretapOTError):
    """Exact enumeration would exceed the configured state-space budget."""


class BudgetExceeded(WiretapOTError):
    pass


class NonConvergence(WiretapOTError, RuntimeWarning):
    """Optimizer hit its iteration cap; the best point found is still returned."""
