"""Exception types shared across the package."""


class BihnlsError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidParams(BihnlsError, ValueError):
    """Parameters outside their declared domain.  ``hypothesis`` names the rule."""

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class HypothesisViolated(InvalidParams):
    """A lemma or theorem hypothesis fails for the given parameters."""


class ConstructionFailed(BihnlsError):
    """A case construction produced a nonpositive margin or an inadmissible pair."""

    def __init__(self, message: str, label: str = "", margin=None):
        super().__init__(message)
        self.label = label
        self.margin = margin


class MarginMismatch(BihnlsError):
    """Re-verification of a witness disagrees with its recorded values."""


class GridTooCoarse(BihnlsError):
    pass


class PartitionMismatch(BihnlsError):
    pass


class SupportNotCovered(BihnlsError):
    pass


class ResonanceUnresolved(BihnlsError):
    pass


class AliasRisk(BihnlsError):
    pass


class EnergyUndefined(BihnlsError):
    pass
