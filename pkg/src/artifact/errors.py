"""Exception types. Each one maps to a distinct CLI exit code (see cli.EXIT_CODES)."""


class ArtifactError(Exception):
    pass


class NonCommensurateTorus(ArtifactError):
    pass


class FlagViolation(ArtifactError):
    pass


class SolverFailure(ArtifactError):
    pass


class NoGap(ArtifactError):
    pass


class FermiOnSpectrum(ArtifactError):
    pass


class EnclosureFailure(ArtifactError):
    pass


class QuadratureDivergence(ArtifactError):
    pass


class GapTooSmall(ArtifactError):
    pass


class MissingGenerator(ArtifactError):
    pass


class DegenerateFit(ArtifactError):
    pass


class GaplessAtFilling(ArtifactError):
    pass


class InsufficientData(ArtifactError):
    pass


class ZTooCloseToSpectrum(ArtifactError):
    pass


class ConfigError(ArtifactError):
    pass
