"""Detuning sweeps, critical-point location, and bifurcation scans of S_R.

Zero-derivative detunings of the reflected spectrum are found by sign-change
bracketing of a central-difference derivative on a dense grid, refined by
bisection.  Points are classified as

  * ``full-conversion-max``: a local maximum realizing complete phase-to-
    amplitude conversion.  Lossless cavities are classified by S_R reaching
    S_q within 1e-6 relative; lossy ones by the rotation-angle magnitude
    coming within ``LOSSY_ANGLE_TOL`` of pi/2 (losses keep S_R strictly
    below S_q, so the spectrum criterion would never fire).
  * ``inflection``: the stationary point between two complete conversions.
  * ``partial-extremum``: the single stationary point of partial conversion
    (analysis frequency below the conversion threshold), or a numerically
    degenerate cluster right at the threshold.

All scans are deterministic pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cavity import EPS_CARRIER, AIRY, CavityParams
from .errors import NumericalFailureError, ParameterError
from .transfer import SidebandState, _coefficient_arrays, _validate_nu

#: Central-difference step for dS_R/ddelta, in bandwidth units.
DERIVATIVE_STEP = 1e-6
#: Derivative magnitudes below this (times max(S_q, 1)) are rounding noise,
#: not sign changes; a flat spectrum (sp == sq) stays rootless.
_DERIVATIVE_FLOOR = 1e-8
#: Critical points closer than this merge into one degenerate point.
_MERGE_TOL = 1e-2
#: Lossy full-conversion test: rotation magnitude within this of pi/2.
LOSSY_ANGLE_TOL = 5e-2

FULL_CONVERSION = "full-conversion-max"
PARTIAL_EXTREMUM = "partial-extremum"
INFLECTION = "inflection"


@dataclass(frozen=True)
class NoiseSweep:
    """Reflected-noise sweep over a detuning grid, with per-row diagnostics."""

    delta: np.ndarray
    s_r: np.ndarray
    theta_signed: np.ndarray
    g_p_abs: np.ndarray
    g_q_abs: np.ndarray
    g_vp_abs: np.ndarray
    g_vq_abs: np.ndarray
    r_abs2: np.ndarray
    theta_r: np.ndarray
    metadata: dict
    excluded: list = field(default_factory=list)

    def __len__(self):
        return self.delta.size


@dataclass(frozen=True)
class CriticalPoint:
    delta: float
    kind: str
    s_r: float
    theta_magnitude: float


@dataclass(frozen=True)
class CriticalSet:
    """Zero-derivative detunings delta > 0 of S_R at one analysis frequency."""

    nu: float
    points: tuple[CriticalPoint, ...]

    def deltas(self, kind: str | None = None) -> list[float]:
        return [p.delta for p in self.points if kind is None or p.kind == kind]


@dataclass(frozen=True)
class ScanEntry:
    nu: float
    critical: CriticalSet | None
    error: str | None = None


@dataclass(frozen=True)
class MatchingRow:
    t2: float
    smallest_full_conversion: float | None
    note: str = ""


def _spectrum_arrays(deltas, nu, state, cavity, eps_carrier):
    g_p, g_q, g_vp, g_vq = _coefficient_arrays(deltas, nu, cavity, eps_carrier)
    s_r = (
        np.abs(g_p) ** 2 * state.sp
        + np.abs(g_q) ** 2 * state.sq
        + np.abs(g_vp) ** 2
        + np.abs(g_vq) ** 2
    )
    return s_r, g_p, g_q, g_vp, g_vq


def detuning_sweep(
    delta_min: float,
    delta_max: float,
    points: int,
    nu: float,
    state: SidebandState,
    cavity: CavityParams,
    eps_carrier: float = EPS_CARRIER,
) -> NoiseSweep:
    """Uniform sweep of S_R and its diagnostics over [delta_min, delta_max].

    Rows whose carrier is extinguished or whose sidebands leave the
    single-resonance window are excluded and reported in ``excluded``.
    """
    state.require_aligned()
    _validate_nu(nu)
    if not (math.isfinite(delta_min) and math.isfinite(delta_max)) or delta_min >= delta_max:
        raise ParameterError("sweep range must satisfy delta_min < delta_max")
    if points < 2:
        raise ParameterError(f"sweep needs at least 2 points, got {points}")
    half = cavity.half_period if cavity.model == AIRY else math.inf
    if max(abs(delta_min), abs(delta_max)) > half:
        raise ParameterError(
            f"sweep range must stay within half a free spectral range (F/2 = {half:g})"
        )

    grid = np.linspace(delta_min, delta_max, points)
    from .cavity import amplitude_reflectance, reflection_phase

    r_carrier = amplitude_reflectance(grid, cavity).value
    valid = np.abs(r_carrier) > eps_carrier
    excluded = [
        {"delta": float(d), "reason": "carrier-extinguished"} for d in grid[~valid]
    ]
    if cavity.model == AIRY:
        in_window = (np.abs(grid + nu) <= half) & (np.abs(grid - nu) <= half)
        excluded += [
            {"delta": float(d), "reason": "detuning-out-of-range"}
            for d in grid[valid & ~in_window]
        ]
        valid &= in_window

    sub = grid[valid]
    s_r, g_p, g_q, g_vp, g_vq = _spectrum_arrays(sub, nu, state, cavity, eps_carrier)
    theta = np.asarray(reflection_phase(sub, cavity, eps_carrier))
    theta_p = np.asarray(reflection_phase(sub + nu, cavity, eps_carrier)) if sub.size else theta
    theta_m = np.asarray(reflection_phase(sub - nu, cavity, eps_carrier)) if sub.size else theta

    metadata = {
        "r1": cavity.mirrors.R1,
        "t2": cavity.mirrors.loss_t2,
        "model": cavity.model,
        "sp": state.sp,
        "sq": state.sq,
        "nu": nu,
        "delta_min": delta_min,
        "delta_max": delta_max,
        "points": points,
    }
    return NoiseSweep(
        delta=sub,
        s_r=s_r,
        theta_signed=theta - 0.5 * (theta_p + theta_m),
        g_p_abs=np.abs(g_p),
        g_q_abs=np.abs(g_q),
        g_vp_abs=np.abs(g_vp),
        g_vq_abs=np.abs(g_vq),
        r_abs2=np.abs(r_carrier[valid]) ** 2,
        theta_r=theta,
        metadata=metadata,
        excluded=excluded,
    )


def _default_search_max(nu: float, cavity: CavityParams) -> float:
    limit = max(3.0 * nu, 5.0)
    if cavity.model == AIRY:
        airy_cap = cavity.half_period - nu - 1e-9
        if airy_cap <= 0:
            raise ParameterError(
                "finesse too low: no positive detuning keeps both sidebands "
                "within half a free spectral range"
            )
        limit = min(limit, airy_cap)
    return limit


def _derivative(deltas, nu, state, cavity, eps_carrier, h=DERIVATIVE_STEP):
    up, _, _, _, _ = _spectrum_arrays(deltas + h, nu, state, cavity, eps_carrier)
    dn, _, _, _, _ = _spectrum_arrays(deltas - h, nu, state, cavity, eps_carrier)
    return (up - dn) / (2.0 * h)


def _bisect_derivative(lo, hi, d_lo, nu, state, cavity, eps_carrier, tol):
    # Plain bisection on the central-difference derivative sign.
    sign_lo = math.copysign(1.0, d_lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d_mid = float(_derivative(np.asarray(mid), nu, state, cavity, eps_carrier))
        if d_mid == 0.0:
            return mid
        if math.copysign(1.0, d_mid) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_critical_detunings(
    nu: float,
    state: SidebandState,
    cavity: CavityParams,
    tol: float = 1e-9,
    *,
    delta_max: float | None = None,
    grid_points: int = 10_000,
    eps_carrier: float = EPS_CARRIER,
) -> CriticalSet:
    """Locate and classify all zero-derivative detunings delta > 0 of S_R.

    A flat spectrum (sp == sq) legitimately has no isolated stationary point
    and returns an empty set; for sp != sq an empty bracketing scan means
    the search failed and raises NumericalFailureError.
    """
    state.require_aligned()
    _validate_nu(nu)
    if not tol > 0.0:
        raise ParameterError("tol must be positive")
    if grid_points < 16:
        raise ParameterError("grid_points too small to bracket sign changes")
    upper = _default_search_max(nu, cavity) if delta_max is None else float(delta_max)
    if cavity.model == AIRY and upper + nu > cavity.half_period:
        raise ParameterError("delta_max + nu exceeds half a free spectral range")

    grid = np.linspace(upper / grid_points, upper, grid_points)
    deriv = _derivative(grid, nu, state, cavity, eps_carrier)
    floor = _DERIVATIVE_FLOOR * max(state.sq, 1.0)
    significant = np.abs(deriv) > floor
    sign_change = (deriv[:-1] * deriv[1:] < 0.0) & significant[:-1] & significant[1:]

    # The bracket's entering sign tells max (+ -> -) from min (- -> +).
    roots = [
        (
            _bisect_derivative(
                grid[i], grid[i + 1], deriv[i], nu, state, cavity, eps_carrier, tol / 4.0
            ),
            deriv[i] > 0.0,
        )
        for i in np.nonzero(sign_change)[0]
    ]
    if not roots:
        if state.sp != state.sq:
            raise NumericalFailureError(
                f"no zero-derivative bracket found on (0, {upper:g}] at nu = {nu}"
            )
        return CriticalSet(nu=nu, points=())

    # Merge numerically indistinguishable roots (threshold coalescence).
    clusters: list[list[tuple[float, bool]]] = [[roots[0]]]
    for r in roots[1:]:
        if r[0] - clusters[-1][-1][0] < _MERGE_TOL:
            clusters[-1].append(r)
        else:
            clusters.append([r])

    points = []
    for cluster in clusters:
        delta_c = float(np.mean([r for r, _ in cluster]))
        is_max = cluster[0][1]
        s_r = float(_spectrum_arrays(np.asarray(delta_c), nu, state, cavity, eps_carrier)[0])
        g_p, g_q, _, _ = _coefficient_arrays(np.asarray(delta_c), nu, cavity, eps_carrier)
        theta_mag = math.atan2(abs(complex(g_q)), abs(complex(g_p)))
        if len(cluster) > 1:
            kind = PARTIAL_EXTREMUM
        elif cavity.lossless:
            kind = FULL_CONVERSION if is_max and s_r >= state.sq * (1.0 - 1e-6) else None
        else:
            kind = FULL_CONVERSION if is_max and (0.5 * math.pi - theta_mag) <= LOSSY_ANGLE_TOL else None
        points.append([delta_c, kind, s_r, theta_mag])

    full_deltas = [p[0] for p in points if p[1] == FULL_CONVERSION]
    for p in points:
        if p[1] is None:
            between = len(full_deltas) >= 2 and min(full_deltas) < p[0] < max(full_deltas)
            p[1] = INFLECTION if between else PARTIAL_EXTREMUM

    return CriticalSet(
        nu=nu,
        points=tuple(
            CriticalPoint(delta=p[0], kind=p[1], s_r=p[2], theta_magnitude=p[3])
            for p in sorted(points)
        ),
    )


def _max_rotation_magnitude(nu, cavity, eps_carrier, grid_points=4001):
    """Maximum over delta > 0 of the rotation-angle magnitude at fixed nu."""
    upper = _default_search_max(nu, cavity)
    grid = np.linspace(upper / grid_points, upper, grid_points)
    g_p, g_q, _, _ = _coefficient_arrays(grid, nu, cavity, eps_carrier)
    angles = np.arctan2(np.abs(g_q), np.abs(g_p))
    i = int(np.argmax(angles))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]

    def angle(x):
        gp, gq, _, _ = _coefficient_arrays(np.asarray(x), nu, cavity, eps_carrier)
        return math.atan2(abs(complex(gq)), abs(complex(gp)))

    # Golden-section maximization; tolerant of the fold at pi/2.
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = angle(c), angle(d)
    for _ in range(80):
        if b - a < 1e-12:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = angle(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = angle(d)
    return max(float(angles[i]), fc, fd)


def conversion_threshold(
    cavity: CavityParams,
    *,
    nu_low: float = 0.5,
    nu_high: float = 3.0,
    angle_tol: float = 1e-8,
    nu_tol: float = 1e-4,
    eps_carrier: float = EPS_CARRIER,
) -> float:
    """Smallest analysis frequency at which complete conversion is reached.

    Bisects on nu for the predicate "max over delta of the rotation-angle
    magnitude reaches pi/2 within angle_tol".  For a lossless high-finesse
    cavity the result is sqrt(2) to well inside 1e-2.
    """

    def complete(nu):
        return _max_rotation_magnitude(nu, cavity, eps_carrier) >= 0.5 * math.pi - angle_tol

    if not complete(nu_high):
        raise NumericalFailureError(
            f"max rotation angle at nu = {nu_high} stays below pi/2; "
            "conversion threshold bracket invalid"
        )
    if complete(nu_low):
        raise NumericalFailureError(
            f"conversion already complete at nu = {nu_low}; bracket invalid"
        )
    lo, hi = nu_low, nu_high
    while hi - lo > nu_tol:
        mid = 0.5 * (lo + hi)
        if complete(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def bifurcation_scan(
    nu_min: float,
    nu_max: float,
    steps: int,
    cavity: CavityParams,
    state: SidebandState | None = None,
    tol: float = 1e-9,
    eps_carrier: float = EPS_CARRIER,
) -> list[ScanEntry]:
    """Critical sets over a grid of analysis frequencies.

    Per-sample failures are recorded and the scan continues.  The reference
    aligned state sp = 0.5, sq = 2.0 is used when none is given (lossless
    critical detunings do not depend on it).
    """
    if not (0.0 < nu_min < nu_max <= 20.0):
        raise ParameterError("bifurcation range must satisfy 0 < nu_min < nu_max <= 20")
    if steps < 2:
        raise ParameterError("bifurcation scan needs at least 2 steps")
    if state is None:
        state = SidebandState(sp=0.5, sq=2.0)
    entries = []
    for nu in np.linspace(nu_min, nu_max, steps):
        try:
            critical = find_critical_detunings(
                float(nu), state, cavity, tol, eps_carrier=eps_carrier
            )
            entries.append(ScanEntry(nu=float(nu), critical=critical))
        except (NumericalFailureError, ParameterError) as exc:
            entries.append(ScanEntry(nu=float(nu), critical=None, error=str(exc)))
    return entries


def matching_study(
    nu: float,
    r1: float,
    t2_values,
    state: SidebandState | None = None,
    tol: float = 1e-9,
    eps_carrier: float = EPS_CARRIER,
) -> list[MatchingRow]:
    """Smallest full-conversion detuning versus output-mirror loss T2.

    As R2 approaches R1 (impedance matching) the smallest detuning of
    complete conversion falls toward zero.  Configurations without a full
    conversion, or with an extinguished carrier, are recorded as such.
    """
    from .cavity import MirrorPair
    from .errors import CarrierExtinguishedError

    _validate_nu(nu)
    if state is None:
        state = SidebandState(sp=0.5, sq=2.0)
    rows = []
    for t2 in sorted(float(v) for v in t2_values):
        cavity = CavityParams(MirrorPair.from_loss(r1, t2))
        try:
            critical = find_critical_detunings(nu, state, cavity, tol, eps_carrier=eps_carrier)
        except CarrierExtinguishedError:
            rows.append(MatchingRow(t2=t2, smallest_full_conversion=None, note="carrier-extinguished"))
            continue
        full = critical.deltas(FULL_CONVERSION)
        if full:
            rows.append(MatchingRow(t2=t2, smallest_full_conversion=min(full)))
        else:
            rows.append(MatchingRow(t2=t2, smallest_full_conversion=None, note="no-full-conversion"))
    return rows
