class QMCHyperinterpError(Exception):
    """Base class for errors raised by qmc_hyperinterp"""


class ConfigError(QMCHyperinterpError, ValueError):
    """Invalid parameters or inputs"""


class ImpossibilityError(QMCHyperinterpError):
    """The requested object cannot exist, e.g. reconstruction with |I| > N"""


class ResourceCapError(QMCHyperinterpError):
    """A configured size cap would be exceeded"""


class ConvergenceError(QMCHyperinterpError):
    """An iterative or adaptive routine did not converge"""


class AssumptionError(QMCHyperinterpError):
    """Inputs violate the premise of the check being run"""
