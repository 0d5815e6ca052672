"""Exception hierarchy shared by the library and the CLI."""


class ArtmapSeqError(Exception):
    """Base class for every error raised by this package."""


class FastaParseError(ArtmapSeqError):
    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class InsufficientSequencesError(ArtmapSeqError):
    def __init__(self, family, shortfall):
        self.family = family
        self.shortfall = shortfall
        super().__init__(f"family {family!r} short by {shortfall}")


class FeatureError(ArtmapSeqError, ValueError):
    pass


class ModelError(ArtmapSeqError, ValueError):
    pass


class BundleError(ArtmapSeqError):
    """Raised when a serialized model fails validation."""


class ConfigError(ArtmapSeqError):
    pass
