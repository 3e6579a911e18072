"""
Exception hierarchy for towerlab
"""


class TowerLabError(Exception):
    """Base class for every error raised by the library."""


class FieldError(TowerLabError):
    """Bad field parameters, division by zero, or a zero polynomial."""


class SeriesError(TowerLabError):
    """Insufficient precision or a non-invertible leading coefficient."""


class UnknownIdentityError(TowerLabError):
    pass


class UnknownTowerError(TowerLabError):
    pass


class InadmissibleCharacteristicError(TowerLabError):
    """The field characteristic divides the level of the tower."""


class ChainError(TowerLabError):
    """Invalid chain or projection range."""


class RamificationError(TowerLabError):
    """Inconsistent ramification profile or unsupported branch structure."""


class GenusUnavailableError(TowerLabError):
    pass
