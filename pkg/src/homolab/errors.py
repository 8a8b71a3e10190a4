"""Exception types shared across the package."""


class HomolabError(Exception):
    """Base class for all package-specific errors."""


class CollisionError(HomolabError):
    """A pairwise separation fell below the collision threshold."""


class UnsupportedDimensionError(HomolabError):
    """Requested quantity is only defined in 2 or 3 spatial dimensions."""


class ConvergenceError(HomolabError):
    """An iterative solver failed to reach its tolerance."""


class ConfigError(HomolabError):
    """A configuration file failed validation; message carries file:line."""
