"""Quadrature transfer through the cavity and the reflected noise spectrum.

Reflection imprints the carrier phase theta_R(delta) and the sideband
responses r(delta +- nu) on the amplitude quadrature of the reflected
beam.  The four transfer coefficients

    2 g_p  = e^{-i theta_R} r(delta + nu) + e^{+i theta_R} r*(delta - nu)
    2 g_q  = e^{-i theta_R} r(delta + nu) - e^{+i theta_R} r*(delta - nu)
    2 g_vp = e^{-i theta_R} t(delta + nu) + e^{+i theta_R} t*(delta - nu)
    2 g_vq = e^{-i theta_R} t(delta + nu) - e^{+i theta_R} t*(delta - nu)

combine into the reflected amplitude-noise power

    S_R = |g_p|^2 S_p + |g_q|^2 S_q + |g_vp|^2 + |g_vq|^2

with vacuum noise normalized to 1.  Energy conservation of the responses
makes the four squared magnitudes sum to exactly 1, so shot noise
(S_p = S_q = 1) is invariant.

The signed rotation angle of the noise ellipse is defined as the carrier
phase relative to the mean sideband phase on the continuous branch,

    theta_signed = theta_R(delta) - [theta_R(delta+nu) + theta_R(delta-nu)] / 2

which vanishes far from resonance and satisfies |g_p| = |cos theta_signed|
exactly for a lossless cavity.

All functions are pure; detunings accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import (
    EPS_CARRIER,
    AIRY,
    CavityParams,
    amplitude_reflectance,
    amplitude_transmittance,
    reflection_phase,
    _as_detuning_array,
    _check_single_resonance,
    _maybe_scalar,
)
from .errors import ParameterError


@dataclass(frozen=True)
class SidebandState:
    """Quadrature noise powers of the input sidebands (shot noise = 1).

    sp and sq are the amplitude- and phase-quadrature noise powers; beta is
    the noise-ellipse orientation relative to the carrier.  Spectrum
    operations require beta = 0 and reject anything else.
    """

    sp: float
    sq: float
    beta: float = 0.0

    def __post_init__(self):
        for name, value in (("sp", self.sp), ("sq", self.sq)):
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        if not math.isfinite(self.beta):
            raise ParameterError("beta must be finite")
        if self.sp * self.sq < 1.0 - 1e-12:
            raise ParameterError(
                f"sp*sq = {self.sp * self.sq} violates the uncertainty bound sp*sq >= 1"
            )

    def require_aligned(self):
        if self.beta != 0.0:
            raise ParameterError(
                "spectrum operations require the noise ellipse aligned with the "
                f"carrier (beta = 0), got beta = {self.beta}"
            )


@dataclass(frozen=True)
class NoiseEllipse:
    """Optimally squeezed/anti-squeezed noise powers and ellipse orientation."""

    s_x: float
    s_y: float
    orientation: float

    def __post_init__(self):
        if self.s_x > self.s_y:
            raise ParameterError("s_x must not exceed s_y")
        if self.s_x * self.s_y < 1.0 - 1e-12:
            raise ParameterError("s_x*s_y violates the uncertainty bound")

    @classmethod
    def from_state(cls, state: SidebandState) -> "NoiseEllipse":
        """Ellipse of an aligned state: axes are the sorted quadrature powers."""
        state.require_aligned()
        if state.sp <= state.sq:
            return cls(s_x=state.sp, s_y=state.sq, orientation=0.0)
        return cls(s_x=state.sq, s_y=state.sp, orientation=0.5 * math.pi)


@dataclass(frozen=True)
class TransferCoefficients:
    """The four complex coefficients at one (delta, nu) point."""

    g_p: complex
    g_q: complex
    g_vp: complex
    g_vq: complex

    @property
    def weights(self) -> tuple[float, float, float, float]:
        return (
            abs(self.g_p) ** 2,
            abs(self.g_q) ** 2,
            abs(self.g_vp) ** 2,
            abs(self.g_vq) ** 2,
        )

    @property
    def total_weight(self) -> float:
        """Sums to 1 for any valid cavity (total noise conservation)."""
        return sum(self.weights)


@dataclass(frozen=True)
class RotationAngle:
    """Noise-ellipse rotation at one sweep point.

    magnitude is atan2(|g_q|, |g_p|) in [0, pi/2]; signed is the continuous
    carrier-minus-mean-sideband phase, odd in delta and zero far from
    resonance.
    """

    magnitude: float
    signed: float


def _validate_nu(nu: float):
    if not isinstance(nu, (int, float)) or not math.isfinite(nu) or nu <= 0.0:
        raise ParameterError(f"analysis frequency nu must be positive, got {nu!r}")


def _coefficient_arrays(deltas, nu, cavity: CavityParams, eps_carrier=EPS_CARRIER):
    """Vectorized g_p, g_q, g_vp, g_vq over an array of carrier detunings."""
    theta = reflection_phase(deltas, cavity, eps_carrier)
    phase = np.exp(-1j * np.asarray(theta))
    r_plus = amplitude_reflectance(deltas + nu, cavity).value
    r_minus = amplitude_reflectance(deltas - nu, cavity).value
    t_plus = amplitude_transmittance(deltas + nu, cavity).value
    t_minus = amplitude_transmittance(deltas - nu, cavity).value
    a = phase * r_plus
    b = np.conj(phase * r_minus)
    c = phase * t_plus
    d = np.conj(phase * t_minus)
    return 0.5 * (a + b), 0.5 * (a - b), 0.5 * (c + d), 0.5 * (c - d)


def transfer_coefficients(
    delta: float, nu: float, cavity: CavityParams, eps_carrier: float = EPS_CARRIER
) -> TransferCoefficients:
    """Evaluate the four transfer coefficients at one (delta, nu) point.

    theta_R(delta) is computed once and shared by all four coefficients so
    the phase-branch choice is internally consistent.
    """
    _validate_nu(nu)
    arr = _as_detuning_array(delta)
    _check_single_resonance(
        np.stack([arr + nu, arr - nu]), cavity, "sideband detuning delta +- nu"
    )
    g_p, g_q, g_vp, g_vq = _coefficient_arrays(arr, nu, cavity, eps_carrier)
    return TransferCoefficients(
        g_p=complex(g_p), g_q=complex(g_q), g_vp=complex(g_vp), g_vq=complex(g_vq)
    )


def reflected_noise(
    delta,
    nu: float,
    state: SidebandState,
    cavity: CavityParams,
    eps_carrier: float = EPS_CARRIER,
):
    """Amplitude-noise power S_R(delta, nu) of the reflected beam."""
    state.require_aligned()
    _validate_nu(nu)
    arr = _as_detuning_array(delta)
    _check_single_resonance(
        np.stack([arr + nu, arr - nu]), cavity, "sideband detuning delta +- nu"
    )
    g_p, g_q, g_vp, g_vq = _coefficient_arrays(arr, nu, cavity, eps_carrier)
    s_r = (
        np.abs(g_p) ** 2 * state.sp
        + np.abs(g_q) ** 2 * state.sq
        + np.abs(g_vp) ** 2
        + np.abs(g_vq) ** 2
    )
    return _maybe_scalar(s_r, arr)


def rotation_angle(
    delta: float, nu: float, cavity: CavityParams, eps_carrier: float = EPS_CARRIER
) -> RotationAngle:
    """Noise-ellipse rotation angle at one (delta, nu) point."""
    _validate_nu(nu)
    arr = _as_detuning_array(delta)
    _check_single_resonance(
        np.stack([arr + nu, arr - nu]), cavity, "sideband detuning delta +- nu"
    )
    g_p, g_q, _, _ = _coefficient_arrays(arr, nu, cavity, eps_carrier)
    magnitude = math.atan2(abs(complex(g_q)), abs(complex(g_p)))
    theta_c = reflection_phase(delta, cavity, eps_carrier)
    theta_p = reflection_phase(float(arr) + nu, cavity, eps_carrier)
    theta_m = reflection_phase(float(arr) - nu, cavity, eps_carrier)
    signed = theta_c - 0.5 * (theta_p + theta_m)
    return RotationAngle(magnitude=magnitude, signed=signed)


def homodyne_reference(theta_lo: float, state: SidebandState) -> float:
    """Ideal homodyne spectrum cos^2(theta_lo) S_p + sin^2(theta_lo) S_q.

    Cross-check target: a lossless cavity reproduces this with theta_lo
    equal to the rotation-angle magnitude.
    """
    if not math.isfinite(theta_lo):
        raise ParameterError("local-oscillator angle must be finite")
    c, s = math.cos(theta_lo), math.sin(theta_lo)
    return c * c * state.sp + s * s * state.sq


def apply_sideband_phase(theta: float, quadratures: tuple[complex, complex]) -> tuple[complex, complex]:
    """Shift the upper sideband by theta and return the new (dp, dq) pair.

    At theta = pi the amplitude quadrature takes over the phase quadrature
    up to a leading phase; theta = 2 pi restores the identity.
    """
    if not math.isfinite(theta):
        raise ParameterError("sideband phase must be finite")
    dp, dq = quadratures
    upper = 0.5 * (dp + 1j * dq) * np.exp(1j * theta)
    lower = 0.5 * (dp - 1j * dq)
    return complex(upper + lower), complex(-1j * (upper - lower))
