"""Exception and warning classes shared across the package."""


class FluxsizeError(Exception):
    """Base class for all package errors."""


class DomainError(FluxsizeError, ValueError):
    """An argument lies outside the domain of an operation."""


class PerturbationDomainError(DomainError):
    """Superfluid velocity at or beyond the critical (depairing) velocity."""


class NoSolutionError(FluxsizeError):
    """The gap equation has no root in (0, omega_D)."""


class ConvergenceError(FluxsizeError):
    """An iterative solver hit its iteration cap."""


class ResolutionError(FluxsizeError):
    """A momentum/energy grid is too coarse for the requested computation."""


class ConfigurationError(FluxsizeError):
    """A run or junction configuration is incomplete or inconsistent."""


class CapacityError(FluxsizeError):
    """An exact enumeration would be too large."""


class IndistinguishableBranchesError(FluxsizeError):
    """The two branches have identical mode occupations (Delta N_tot = 0)."""


class SchemaError(FluxsizeError, ValueError):
    """An input document violates its schema.

    ``problems`` maps a dotted field path to a message.
    """

    def __init__(self, problems, source=None):
        self.problems = dict(problems)
        self.source = source
        where = f"{source}: " if source else ""
        detail = "; ".join(f"{k}: {v}" for k, v in self.problems.items())
        super().__init__(f"{where}{detail}")


class PerturbativeBreakdownWarning(UserWarning):
    """A first-order occupation left [0, 1]."""


class GeometryWarning(UserWarning):
    """Device geometry fails a planar-loop sanity bound."""
