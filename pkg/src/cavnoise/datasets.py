"""Dataset assembly and serialization shared by the HTTP service and the CLI.

Every dataset carries a flat metadata mapping holding the fully resolved
run configuration; re-running a command from that mapping reproduces the
data rows bit-identically.  CSV files are UTF-8 with LF line endings,
``# key=value`` metadata lines, a header row, and 9-significant-digit
values; JSON files mirror the same records.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    bifurcation_scan,
    detuning_sweep,
    find_critical_detunings,
    matching_study,
)
from .cavity import AIRY, CavityParams, MirrorPair, amplitude_reflectance, amplitude_transmittance, reflection_phase
from .errors import ParameterError
from .montecarlo import SamplerConfig, estimate_noise
from .transfer import SidebandState, reflected_noise


@dataclass
class Dataset:
    command: str
    columns: list[str]
    rows: list[dict]
    metadata: dict = field(default_factory=dict)


def _cavity(r1: float, t2: float, model: str) -> CavityParams:
    return CavityParams(MirrorPair.from_loss(r1, t2), model=model)


def _base_metadata(command: str, r1: float, t2: float, model: str) -> dict:
    return {"command": command, "r1": r1, "t2": t2, "model": model}


def build_reflectance(
    r1: float = 0.95,
    t2: float = 0.003,
    model: str = AIRY,
    delta_min: float | None = None,
    delta_max: float | None = None,
    points: int = 2001,
) -> Dataset:
    """Squared reflectivity, unwrapped phase and transmitted power over a grid.

    The default grid covers one full free spectral range so the phase branch
    runs all the way from 0 to 2 pi (Lorentzian model: +-10 bandwidths).
    """
    cavity = _cavity(r1, t2, model)
    if delta_min is None or delta_max is None:
        half = cavity.half_period if model == AIRY else 10.0
        delta_min = -half if delta_min is None else delta_min
        delta_max = half if delta_max is None else delta_max
    if not delta_min < delta_max:
        raise ParameterError("grid requires delta_min < delta_max")
    if points < 2:
        raise ParameterError("grid needs at least 2 points")
    grid = np.linspace(delta_min, delta_max, points)

    r = amplitude_reflectance(grid, cavity)
    t = amplitude_transmittance(grid, cavity)
    from .cavity import EPS_CARRIER

    valid = np.asarray(np.abs(r.value)) > EPS_CARRIER
    theta = np.asarray(reflection_phase(grid[valid], cavity))
    rows = []
    it = iter(theta)
    for d, ok, rv, tv in zip(grid, valid, np.asarray(r.magnitude_sq), np.asarray(t.magnitude_sq)):
        if not ok:
            continue
        rows.append(
            {"delta": float(d), "r_abs2": float(rv), "theta_r": float(next(it)), "t_abs2": float(tv)}
        )
    meta = _base_metadata("reflectance", r1, t2, model)
    meta.update({"delta_min": float(delta_min), "delta_max": float(delta_max), "points": points})
    excluded = [float(d) for d in grid[~valid]]
    if excluded:
        meta["excluded"] = ";".join(f"{d!r}:carrier-extinguished" for d in excluded)
    return Dataset("reflectance", ["delta", "r_abs2", "theta_r", "t_abs2"], rows, meta)


def build_sweep(
    r1: float = 0.95,
    t2: float = 0.003,
    model: str = AIRY,
    sp: float = 0.5,
    sq: float = 2.0,
    nu: float = 6.0,
    delta_min: float = -12.0,
    delta_max: float = 12.0,
    points: int = 2001,
) -> Dataset:
    cavity = _cavity(r1, t2, model)
    state = SidebandState(sp=sp, sq=sq)
    sweep = detuning_sweep(delta_min, delta_max, points, nu, state, cavity)
    rows = [
        {
            "delta": float(d),
            "s_r": float(s),
            "theta_signed": float(th),
            "g_p_abs": float(gp),
            "g_q_abs": float(gq),
            "g_vp_abs": float(gvp),
            "g_vq_abs": float(gvq),
        }
        for d, s, th, gp, gq, gvp, gvq in zip(
            sweep.delta,
            sweep.s_r,
            sweep.theta_signed,
            sweep.g_p_abs,
            sweep.g_q_abs,
            sweep.g_vp_abs,
            sweep.g_vq_abs,
        )
    ]
    meta = _base_metadata("sweep", r1, t2, model)
    meta.update(
        {
            "sp": sp,
            "sq": sq,
            "nu": nu,
            "delta_min": delta_min,
            "delta_max": delta_max,
            "points": points,
        }
    )
    if sweep.excluded:
        meta["excluded"] = ";".join(f"{e['delta']!r}:{e['reason']}" for e in sweep.excluded)
    return Dataset(
        "sweep",
        ["delta", "s_r", "theta_signed", "g_p_abs", "g_q_abs", "g_vp_abs", "g_vq_abs"],
        rows,
        meta,
    )


def build_rotation(
    r1: float = 0.95,
    t2: float = 0.003,
    model: str = AIRY,
    nu: float = 6.0,
    delta_min: float = -12.0,
    delta_max: float = 12.0,
    points: int = 2001,
) -> Dataset:
    cavity = _cavity(r1, t2, model)
    # Rotation angles are state-independent; the sweep machinery provides them.
    sweep = detuning_sweep(delta_min, delta_max, points, nu, SidebandState(1.0, 1.0), cavity)
    magnitude = np.arctan2(sweep.g_q_abs, sweep.g_p_abs)
    rows = [
        {"delta": float(d), "theta_signed": float(s), "theta_magnitude": float(m)}
        for d, s, m in zip(sweep.delta, sweep.theta_signed, magnitude)
    ]
    meta = _base_metadata("rotation", r1, t2, model)
    meta.update({"nu": nu, "delta_min": delta_min, "delta_max": delta_max, "points": points})
    if sweep.excluded:
        meta["excluded"] = ";".join(f"{e['delta']!r}:{e['reason']}" for e in sweep.excluded)
    return Dataset("rotation", ["delta", "theta_signed", "theta_magnitude"], rows, meta)


def build_critical(
    r1: float = 0.95,
    t2: float = 0.003,
    model: str = AIRY,
    sp: float = 0.5,
    sq: float = 2.0,
    nu: float = 6.0,
    tol: float = 1e-9,
) -> Dataset:
    cavity = _cavity(r1, t2, model)
    critical = find_critical_detunings(nu, SidebandState(sp=sp, sq=sq), cavity, tol)
    rows = [
        {
            "delta": p.delta,
            "kind": p.kind,
            "s_r": p.s_r,
            "theta_magnitude": p.theta_magnitude,
        }
        for p in critical.points
    ]
    meta = _base_metadata("critical", r1, t2, model)
    meta.update({"sp": sp, "sq": sq, "nu": nu, "tol": tol})
    return Dataset("critical", ["delta", "kind", "s_r", "theta_magnitude"], rows, meta)


def build_bifurcation(
    r1: float = 0.999,
    t2: float = 0.0,
    model: str = AIRY,
    sp: float = 0.5,
    sq: float = 2.0,
    nu_min: float = 0.2,
    nu_max: float = 10.0,
    steps: int = 99,
    tol: float = 1e-9,
) -> Dataset:
    cavity = _cavity(r1, t2, model)
    entries = bifurcation_scan(nu_min, nu_max, steps, cavity, SidebandState(sp=sp, sq=sq), tol)
    rows = []
    failures = []
    for entry in entries:
        if entry.critical is None:
            failures.append(f"{entry.nu!r}:{entry.error}")
            continue
        for p in entry.critical.points:
            rows.append(
                {
                    "nu": entry.nu,
                    "delta": p.delta,
                    "kind": p.kind,
                    "asym_carrier": 0.5,
                    "asym_sideband": entry.nu,
                }
            )
    meta = _base_metadata("bifurcation", r1, t2, model)
    meta.update(
        {"sp": sp, "sq": sq, "nu_min": nu_min, "nu_max": nu_max, "steps": steps, "tol": tol}
    )
    if failures:
        meta["failed_samples"] = ";".join(failures)
    return Dataset(
        "bifurcation", ["nu", "delta", "kind", "asym_carrier", "asym_sideband"], rows, meta
    )


def build_matching(
    nu: float,
    r1: float,
    t2_values,
    sp: float = 0.5,
    sq: float = 2.0,
    tol: float = 1e-9,
) -> Dataset:
    """Library-level matching study serialized like the other datasets."""
    rows = [
        {
            "t2": row.t2,
            "smallest_full_conversion": row.smallest_full_conversion,
            "note": row.note,
        }
        for row in matching_study(nu, r1, t2_values, SidebandState(sp=sp, sq=sq), tol)
    ]
    meta = {
        "command": "matching",
        "r1": r1,
        "model": AIRY,
        "sp": sp,
        "sq": sq,
        "nu": nu,
        "tol": tol,
        "t2_values": ",".join(repr(float(v)) for v in t2_values),
    }
    return Dataset("matching", ["t2", "smallest_full_conversion", "note"], rows, meta)


def build_oracle(
    r1: float = 0.95,
    t2: float = 0.003,
    model: str = AIRY,
    sp: float = 0.5,
    sq: float = 2.0,
    nu: float = 6.0,
    deltas=None,
    delta_min: float = -12.0,
    delta_max: float = 12.0,
    points: int = 9,
    seed: int = 42,
    samples: int = 100_000,
    partitions: int = 1,
) -> Dataset:
    """Monte Carlo versus analytic S_R at the requested detunings."""
    cavity = _cavity(r1, t2, model)
    state = SidebandState(sp=sp, sq=sq)
    if deltas is None:
        if points < 1 or not delta_min < delta_max:
            raise ParameterError("oracle grid requires delta_min < delta_max and points >= 1")
        deltas = [float(d) for d in np.linspace(delta_min, delta_max, points)]
    else:
        deltas = [float(d) for d in deltas]
        if not deltas:
            raise ParameterError("oracle needs at least one detuning")
        if not all(math.isfinite(d) for d in deltas):
            raise ParameterError("oracle detunings must be finite")
    rows = []
    for d in deltas:
        analytic = float(reflected_noise(d, nu, state, cavity))
        est = estimate_noise(
            SamplerConfig(
                seed=seed,
                samples=samples,
                state=state,
                delta=d,
                nu=nu,
                cavity=cavity,
                partitions=partitions,
            )
        )
        rows.append(
            {
                "delta": d,
                "s_r_analytic": analytic,
                "s_r_mc": est.mean,
                "stderr": est.stderr,
                "z_score": (est.mean - analytic) / est.stderr,
            }
        )
    # The worker count never changes the estimates, so it is an execution
    # knob rather than part of the reproducible configuration.
    meta = _base_metadata("oracle", r1, t2, model)
    meta.update(
        {
            "sp": sp,
            "sq": sq,
            "nu": nu,
            "deltas": ",".join(repr(d) for d in deltas),
            "seed": seed,
            "samples": samples,
        }
    )
    return Dataset(
        "oracle", ["delta", "s_r_analytic", "s_r_mc", "stderr", "z_score"], rows, meta
    )


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def to_csv(dataset: Dataset) -> str:
    """CSV text: '#'-prefixed metadata header, column row, 9-digit values."""
    # repr() in the header keeps full precision for bit-identical re-runs.
    lines = []
    for key, value in dataset.metadata.items():
        text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"# {key}={text}")
    lines.append(",".join(dataset.columns))
    for row in dataset.rows:
        lines.append(",".join(_format_value(row.get(col)) for col in dataset.columns))
    return "\n".join(lines) + "\n"


def to_json(dataset: Dataset) -> str:
    payload = {
        "metadata": dataset.metadata,
        "columns": dataset.columns,
        "rows": dataset.rows,
    }
    return json.dumps(payload, indent=2) + "\n"


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key=value configuration, tolerating '#'-prefixed dataset headers.

    JSON dataset files are accepted too; their embedded metadata is used.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(stripped)
        meta = obj.get("metadata", obj) if isinstance(obj, dict) else {}
        return {str(k): str(v) for k, v in meta.items()}
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("#"):
            line = line[1:].strip()
        if not line or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values
