"""Exception types shared across the package."""


class MzDephaseError(Exception):
    """Base class for domain errors raised by this package."""


class ImpossibleOutcome(MzDephaseError):
    """Conditioning was requested on an output port with (near-)zero probability."""


class ZeroCoherenceFactor(MzDephaseError):
    """The coherence transfer factor vanishes, so its phase is undefined and no
    Kraus decomposition can be written down at this instant."""


class PeakNotFound(MzDephaseError):
    """The recoherence signal stays below the detection floor over the whole scan."""


class EstimatorOutOfRegime(MzDephaseError):
    """The interaction-time estimator was invoked outside its validity regime
    (residual interference at the output beam splitter, or no output coupling)."""


class ConfigError(MzDephaseError):
    """Configuration file failed to parse or validate.

    ``problems`` holds one message per offending field, each prefixed with its
    field path, so that all errors can be reported at once.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
