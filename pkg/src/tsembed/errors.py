"""Exception hierarchy shared across the package.

Every error raised by tsembed derives from TsembedError so callers can catch
one type at the harness boundary. The subclasses mirror the failure kinds the
public contracts talk about: malformed input files, schema violations, bad
numeric content, invalid configuration, shape mismatches, numeric breakdowns
inside algorithms, violated call contracts, and size caps.
"""


class TsembedError(Exception):
    """Base class for all package errors."""


class ParseError(TsembedError):
    """A file could not be parsed (bad field count, non-numeric value, ...)."""


class SchemaError(TsembedError):
    """Parsed content violates the format's schema (missing grid entries, ragged channels)."""


class DataError(TsembedError):
    """Content is well-formed but invalid (NaN/Inf values, empty dataset)."""


class ConfigError(TsembedError):
    """A configuration value or parameter is out of its documented range."""


class ShapeError(TsembedError):
    """Array dimensions do not match what an operation requires."""


class NumericError(TsembedError):
    """An algorithm hit a numeric degeneracy (singular system, ill-conditioning)."""


class ContractError(TsembedError):
    """A call precondition was violated (e.g. non-symmetric matrix to a symmetric solver)."""


class CapacityError(TsembedError):
    """An input exceeds a documented size cap."""
