"""Exception hierarchy shared by every dnacap module."""


class DnacapError(Exception):
    """Base class; the CLI maps any subclass to exit code 1."""


class ParameterDomainError(DnacapError, ValueError):
    pass


class DistinctnessError(DnacapError, ValueError):
    pass


class ContractError(DnacapError, ValueError):
    pass


class BoundUndefinedError(DnacapError, ValueError):
    pass


class CapacityError(DnacapError, ValueError):
    pass


class ConfigError(DnacapError, ValueError):
    pass


class FormatError(DnacapError, ValueError):
    pass


class CorruptionDetected(DnacapError):
    pass


class InsufficientCoverage(DnacapError):
    """Fewer distinct molecule positions were sampled than the code dimension."""

    def __init__(self, have: int, need: int):
        self.have = have
        self.need = need
        self.deficit = need - have
        super().__init__(
            f"only {have} distinct positions sampled, {need} required (deficit {self.deficit})"
        )
