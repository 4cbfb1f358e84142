"""Complex amplitude response of a two-mirror optical cavity.

All frequencies in this package are expressed in units of the cavity
bandwidth (the resonance full width at half maximum), so the core math
never needs physical lengths.  In these units the exact (Airy) response
is periodic in the detuning ``delta`` with period equal to the finesse
``F``:

    r(delta) = (r1 - r2 e^{i phi}) / (1 - r1 r2 e^{i phi}),   phi = 2 pi delta / F
    t(delta) = t1 t2 e^{i phi/2} / (1 - r1 r2 e^{i phi})

with amplitude coefficients r_j = sqrt(R_j), t_j = sqrt(1 - R_j).  Energy
conservation |r|^2 + |t|^2 = 1 holds identically.  The optional Lorentzian
model is the high-finesse single-resonance limit

    r_L(delta) = (A0 - 2 i delta) / (1 - 2 i delta),   A0 = (r1 - r2) / (1 - r1 r2)

which is exact for bandwidth-normalized statements and has no periodicity.

``reflection_phase`` returns the continuous phase branch anchored at 0 far
below resonance.  For an overcoupled cavity (R2 > R1) the branch rises
through pi at resonance to 2 pi far above; for an undercoupled one it dips
and returns to 0.  The branch is computed in closed form (the winding is
carried entirely by the numerator of r), so it is pointwise exact and does
not depend on any sampling grid.

All functions are pure and accept scalars or numpy arrays of detunings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    CarrierExtinguishedError,
    DegenerateCavityError,
    DetuningRangeError,
    NumericalFailureError,
    ParameterError,
)

AIRY = "exact-airy"
LORENTZIAN = "lorentzian"
MODELS = (AIRY, LORENTZIAN)

SPEED_OF_LIGHT = 299_792_458.0  # m/s

#: |r(delta)| at or below this is treated as an extinguished carrier.
EPS_CARRIER = 1e-12

# R1*R2 beyond this limit gives a divergent finesse.
_DEGENERACY_LIMIT = 1.0 - 1e-14
# Round-trip denominators smaller than this are numerically meaningless.
_MIN_DENOMINATOR = 1e-14


@dataclass(frozen=True)
class MirrorPair:
    """Intensity reflectivities of the coupling mirror (R1) and output mirror (R2).

    The output-mirror transmission T2 = 1 - R2 represents spurious losses;
    R2 = 1 is the lossless cavity.
    """

    R1: float
    R2: float

    def __post_init__(self):
        for name, value in (("R1", self.R1), ("R2", self.R2)):
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")
        if self.R1 * self.R2 >= _DEGENERACY_LIMIT:
            raise DegenerateCavityError(
                f"R1*R2 = {self.R1 * self.R2} is too close to 1; "
                "the cavity response diverges"
            )

    @classmethod
    def from_loss(cls, r1: float, t2: float) -> "MirrorPair":
        """Build from the coupling reflectivity R1 and the loss transmission T2 = 1 - R2."""
        if not isinstance(t2, (int, float)) or not math.isfinite(t2) or not 0.0 <= t2 <= 1.0:
            raise ParameterError(f"T2 must lie in [0, 1], got {t2!r}")
        return cls(R1=r1, R2=1.0 - t2)

    # Amplitude coefficients, r_j^2 = R_j and t_j^2 = 1 - R_j exactly.
    @property
    def r1(self) -> float:
        return math.sqrt(self.R1)

    @property
    def r2(self) -> float:
        return math.sqrt(self.R2)

    @property
    def t1(self) -> float:
        return math.sqrt(1.0 - self.R1)

    @property
    def t2(self) -> float:
        return math.sqrt(1.0 - self.R2)

    @property
    def loss_t2(self) -> float:
        """Output-mirror intensity transmission (the loss parameter T2)."""
        return 1.0 - self.R2

    @property
    def overcoupled(self) -> bool:
        """True when R2 > R1, the regime where the reflection phase winds by 2 pi."""
        return self.R2 > self.R1


@dataclass(frozen=True)
class CavityParams:
    """A mirror pair plus the response-model selector.

    The optional physical block (round-trip length, speed of light) is used
    only to convert bandwidth-normalized results to laboratory units.
    """

    mirrors: MirrorPair
    model: str = AIRY
    length_m: float | None = None
    light_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.length_m is not None and not self.length_m > 0.0:
            raise ParameterError(f"cavity round-trip length must be > 0, got {self.length_m}")
        if not self.light_speed > 0.0:
            raise ParameterError("light_speed must be > 0")

    @cached_property
    def finesse(self) -> float:
        return finesse(self.mirrors)

    @property
    def half_period(self) -> float:
        """Half of one free spectral range in bandwidth units (= F/2)."""
        return 0.5 * self.finesse

    @property
    def lossless(self) -> bool:
        return self.mirrors.R2 == 1.0

    @property
    def free_spectral_range_hz(self) -> float:
        if self.length_m is None:
            raise ParameterError("free spectral range requires the physical length block")
        return self.light_speed / self.length_m

    @property
    def bandwidth_hz(self) -> float:
        return self.free_spectral_range_hz / self.finesse


@dataclass(frozen=True)
class ComplexResponse:
    """A dimensionless complex amplitude coefficient (scalar or array)."""

    value: complex | np.ndarray

    @property
    def magnitude_sq(self):
        return np.abs(self.value) ** 2

    @property
    def phase(self):
        """Principal argument in (-pi, pi]; see reflection_phase for the unwrapped branch."""
        return np.angle(self.value)


def finesse(mirrors: MirrorPair) -> float:
    """F = pi (R1 R2)^(1/4) / (1 - sqrt(R1 R2)); requires R1*R2 < 1."""
    product = mirrors.R1 * mirrors.R2
    if product >= _DEGENERACY_LIMIT:
        raise DegenerateCavityError("finesse diverges for R1*R2 -> 1")
    return math.pi * product ** 0.25 / (1.0 - math.sqrt(product))


def _as_detuning_array(delta):
    arr = np.asarray(delta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterError("detuning must be finite")
    return arr


def _maybe_scalar(values, arr):
    return values if arr.ndim else values[()]


def _round_trip_phase(delta, cavity: CavityParams):
    # A zero-finesse cavity (R1*R2 = 0) has no resonance: the bandwidth is
    # infinite, so every normalized detuning sees the flat single-pass limit.
    if cavity.finesse == 0.0:
        return np.zeros_like(delta)
    return 2.0 * math.pi * delta / cavity.finesse


def _airy_num_den(delta, cavity: CavityParams):
    m = cavity.mirrors
    phi = _round_trip_phase(delta, cavity)
    round_trip = m.r1 * m.r2 * np.exp(1j * phi)
    den = 1.0 - round_trip
    if np.any(np.abs(den) < _MIN_DENOMINATOR):
        raise NumericalFailureError("round-trip denominator vanished")
    return phi, den


def amplitude_reflectance(delta, cavity: CavityParams) -> ComplexResponse:
    """Amplitude reflection coefficient r(delta) of the cavity."""
    arr = _as_detuning_array(delta)
    m = cavity.mirrors
    if cavity.model == AIRY:
        phi, den = _airy_num_den(arr, cavity)
        value = (m.r1 - m.r2 * np.exp(1j * phi)) / den
    else:
        a0 = (m.r1 - m.r2) / (1.0 - m.r1 * m.r2)
        value = (a0 - 2j * arr) / (1.0 - 2j * arr)
    return ComplexResponse(_maybe_scalar(value, arr))


def amplitude_transmittance(delta, cavity: CavityParams) -> ComplexResponse:
    """Amplitude transmission coefficient t(delta); |r|^2 + |t|^2 = 1."""
    arr = _as_detuning_array(delta)
    m = cavity.mirrors
    if cavity.model == AIRY:
        phi, den = _airy_num_den(arr, cavity)
        value = m.t1 * m.t2 * np.exp(0.5j * phi) / den
    else:
        a0 = (m.r1 - m.r2) / (1.0 - m.r1 * m.r2)
        mag_r_sq = (a0 * a0 + 4.0 * arr * arr) / (1.0 + 4.0 * arr * arr)
        magnitude = np.sqrt(np.clip(1.0 - mag_r_sq, 0.0, None))
        # Phase is half the round-trip dephasing, i.e. -arg(1 - 2 i delta).
        value = magnitude * np.exp(1j * np.arctan2(2.0 * arr, 1.0))
    return ComplexResponse(_maybe_scalar(value, arr))


def _check_single_resonance(arr, cavity: CavityParams, what: str):
    if cavity.model != AIRY or cavity.finesse == 0.0:
        return
    limit = cavity.half_period * (1.0 + 1e-12) + 1e-12
    if np.any(np.abs(arr) > limit):
        raise DetuningRangeError(
            f"{what} must stay within half a free spectral range "
            f"(|delta| <= {cavity.half_period:g} bandwidths)"
        )


def reflection_phase(delta, cavity: CavityParams, eps_carrier: float = EPS_CARRIER):
    """Unwrapped reflected-carrier phase theta_R(delta) = arg r(delta).

    The branch is anchored at 0 far below resonance.  Overcoupled cavities
    wind continuously through pi at resonance up to 2 pi far above it; the
    winding is computed analytically, so the result is grid-independent.

    Raises CarrierExtinguishedError where |r(delta)| <= eps_carrier (exact
    resonance of an impedance-matched cavity) and DetuningRangeError outside
    the single-resonance window of the exact-Airy model.
    """
    arr = _as_detuning_array(delta)
    _check_single_resonance(arr, cavity, "reflection_phase detuning")
    m = cavity.mirrors

    if cavity.model == AIRY:
        phi = _round_trip_phase(arr, cavity)
        num_im = -m.r2 * np.sin(phi)
        num_re = m.r1 - m.r2 * np.cos(phi)
        rho = m.r1 * m.r2
        den_arg = np.arctan2(-rho * np.sin(phi), 1.0 - rho * np.cos(phi))
    else:
        a0 = (m.r1 - m.r2) / (1.0 - m.r1 * m.r2)
        num_im = -2.0 * arr
        num_re = np.full_like(arr, a0)
        den_arg = np.arctan2(-2.0 * arr, 1.0)

    magnitude_sq = (num_re * num_re + num_im * num_im)
    if cavity.model == AIRY:
        den_sq = (1.0 - rho * np.cos(phi)) ** 2 + (rho * np.sin(phi)) ** 2
    else:
        den_sq = 1.0 + 4.0 * arr * arr
    extinguished = magnitude_sq <= (eps_carrier * eps_carrier) * den_sq
    if np.any(extinguished):
        bad = np.atleast_1d(arr)[np.atleast_1d(extinguished)]
        raise CarrierExtinguishedError(
            f"reflected carrier vanishes at delta = {bad[:4].tolist()}; phase undefined"
        )

    num_arg = np.arctan2(num_im, num_re)
    if m.overcoupled:
        # The numerator circles the origin once per free spectral range.
        num_arg = np.where(num_arg < 0.0, num_arg + 2.0 * math.pi, num_arg)
    theta = num_arg - den_arg
    return _maybe_scalar(theta, arr)
