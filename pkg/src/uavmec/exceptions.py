"""Module containing all the exceptions used in uavmec."""


class DomainException(ValueError):
    """Exception associated with arguments outside an operation's domain."""

    pass


class InfeasibleLinkException(Exception):
    """Exception associated with a link that cannot carry the required data."""

    pass


class InfeasibleAllocationException(Exception):
    """Exception associated with a positive workload given no CPU frequency."""

    pass


class ConfigException(Exception):
    """Exception associated with an invalid config file, key or value."""

    pass


class CheckpointException(Exception):
    """Exception associated with unreadable or incompatible checkpoints."""

    pass
