"""Exception hierarchy shared across the package.

CLI exit codes: FormatError and DimensionError map to 3 (invalid input),
ResourceCapError to 4 (resource cap), everything else to the per-command
negative-result code.
"""


class DemonicError(Exception):
    """Base class for all package errors."""


class DimensionError(DemonicError):
    """Operands live over different base sizes."""


class FormatError(DemonicError):
    """Malformed serialized input: bad JSON shape, unknown names, ragged tables."""


class ResourceCapError(DemonicError):
    """A configured size or memory cap would be exceeded."""


class PreconditionError(DemonicError):
    """An operation was called on input that fails its stated precondition."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class DerivationError(DemonicError):
    """A requested fact is not derivable, or a derivation fails replay."""


class CertificateError(DemonicError):
    """A loaded certificate does not re-validate against its structure."""


class ExprError(DemonicError):
    """Relation-expression parse or evaluation error, with source position."""

    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos
