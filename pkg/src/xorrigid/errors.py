"""Exception hierarchy shared by every module."""


class XorRigidError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(XorRigidError, ValueError):
    """An input violates an operation's precondition."""


class CapacityError(XorRigidError):
    """A requested matrix would exceed the configured size cap."""


class SolverError(XorRigidError, RuntimeError):
    """A numerical routine failed to converge."""


class SchemaError(XorRigidError, ValueError):
    """A serialized artifact does not match its expected layout."""
