"""Exception hierarchy shared by the library and the CLI."""


class RavdenError(Exception):
    """Base class for every error raised by ravden"""


class DimensionError(RavdenError, ValueError):
    """Array or frame dimensions are invalid or do not match"""


class FormatError(RavdenError, ValueError):
    """A file on disk is truncated, has a bad magic or an unsupported layout"""


class ParameterError(RavdenError, ValueError):
    """A numeric parameter is outside its valid domain"""


class SequenceLengthError(RavdenError, ValueError):
    """A frame sequence is too short for the requested schedule"""


class ConfigError(RavdenError, ValueError):
    """Configuration file or flag values failed validation"""


class OutputError(RavdenError, OSError):
    """An output file or directory could not be written"""
