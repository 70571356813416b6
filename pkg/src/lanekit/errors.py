"""Exception types shared across the package."""


class LanekitError(Exception):
    """Base class for every error this package raises deliberately."""


class GeoJsonParseError(LanekitError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class AscParseError(LanekitError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class MosaicAlignmentError(LanekitError):
    pass


class GenerationError(LanekitError):
    pass


class ElevationError(LanekitError):
    pass


class ConversionError(LanekitError):
    pass


class NetworkReadError(LanekitError):
    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.path = path


class RuleParseError(LanekitError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.line = line
        self.col = col


class InjectionError(LanekitError):
    pass


class ScoringError(LanekitError):
    pass


class ConfigError(LanekitError):
    pass
