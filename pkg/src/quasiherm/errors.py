"""Exception hierarchy shared by all quasiherm modules."""


class QuasiHermError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatch(QuasiHermError, ValueError):
    pass


class ConvergenceFailure(QuasiHermError):
    pass


class DegenerateSpectrum(QuasiHermError):
    """Two eigenvalues closer than the cluster threshold.

    The biorthogonal construction needs a non-degenerate spectrum; in the
    model families this marks an exceptional point.
    """


class NotHermitian(QuasiHermError, ValueError):
    pass


class NotPositiveDefinite(QuasiHermError):
    pass


class Overflow(QuasiHermError, OverflowError):
    pass


class PairingAmbiguous(QuasiHermError):
    pass


class PairingNotFound(QuasiHermError):
    pass


class ProportionalityViolated(QuasiHermError):
    pass


class PseudoHermiticityViolated(QuasiHermError):
    """``H^dagger P != P H`` beyond tolerance."""


class BrokenPhase(QuasiHermError):
    pass


class ComplexKappa(QuasiHermError):
    pass


class InvolutivityViolated(QuasiHermError):
    pass


class HermitizationFailed(QuasiHermError):
    pass


class ParseError(QuasiHermError, ValueError):
    pass


class InvalidGrid(QuasiHermError, ValueError):
    pass
