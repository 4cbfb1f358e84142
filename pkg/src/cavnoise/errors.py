"""Exception hierarchy shared by all cavnoise modules."""


class CavNoiseError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CavNoiseError, ValueError):
    """A supplied parameter is outside its valid range or inconsistent."""


class DegenerateCavityError(ParameterError):
    """R1*R2 is so close to 1 that the finesse and responses diverge."""


class DetuningRangeError(ParameterError):
    """A detuning falls outside the single-resonance window |delta| <= F/2."""


class NumericalFailureError(CavNoiseError):
    """A numerical procedure could not produce a trustworthy result."""


class CarrierExtinguishedError(NumericalFailureError):
    """|r(delta)| is numerically zero, so the reflected carrier phase is undefined.

    Happens at exact resonance of an impedance-matched cavity (R1 == R2).
    """
