"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class KihError(Exception):
    exit_code = 1


class FormatError(KihError):
    """Malformed serialized data (bad magic, truncated payload, wrong type tag)."""

    exit_code = 3


class InvariantError(KihError):
    """A value violates a structural invariant (bad params, bad matrix entries)."""

    exit_code = 4


class ParamsError(InvariantError):
    pass


class IntegrityError(InvariantError):
    """Robust-mode decoding found a residual outside the error head-room."""


class PreconditionError(KihError):
    exit_code = 5


class StructureError(PreconditionError):
    """Dimension or modulus mismatch between operands."""


class LengthError(PreconditionError):
    """An input bit/symbol string has the wrong length."""


class EpochError(PreconditionError):
    """Key, token and ciphertext epochs do not line up."""


class StaleCacheError(PreconditionError):
    """An incremental evaluation was requested against a cache that cannot serve it."""
