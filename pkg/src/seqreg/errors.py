"""Exception taxonomy: configuration, data, and numerical failures map to
distinct CLI exit codes (1, 2, 3)."""


class SeqregError(Exception):
    """Base class for all seqreg errors."""


class ConfigError(SeqregError):
    """Invalid configuration or usage (bad flag value, unknown key, ...)."""


class DataError(SeqregError):
    """Malformed or inconsistent input data (parse errors, grid mismatch)."""


class SolverError(SeqregError):
    """Numerical failure during optimization (non-finite values, ...)."""
