"""Exception hierarchy shared by the library and the command line."""


class ConfigurationError(ValueError):
    """Bad sizes, mismatched grids, out-of-range parameters."""


class NotAFrameError(ValueError):
    """The Littlewood-Paley lower bound is numerically zero."""


class HypothesisError(ValueError):
    """A theorem hypothesis (upper frame bound, admissible deformation) fails."""
