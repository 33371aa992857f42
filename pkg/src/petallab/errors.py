"""Exception types shared across the package."""


class PetalLabError(Exception):
    """Base class for package errors."""


class DomainError(PetalLabError):
    pass


class PoleError(DomainError):
    pass


class SingularityError(DomainError):
    pass


class ParameterError(PetalLabError):
    pass


class ConfigError(PetalLabError):
    pass


class UnsupportedMap(PetalLabError):
    pass


class UnsupportedPetalKind(PetalLabError):
    pass


class ContinuationError(PetalLabError):
    def __init__(self, msg, seed=None, target=None):
        super().__init__(msg)
        self.seed = seed
        self.target = target


class SeedError(PetalLabError):
    pass


class TopologyError(PetalLabError):
    pass


class AlignmentError(PetalLabError):
    pass


class AuditError(PetalLabError):
    def __init__(self, msg, escape_point=None):
        super().__init__(msg)
        self.escape_point = escape_point


class CensusError(PetalLabError):
    pass
