"""Command-line client for the cavnoise service.

The CLI is a thin HTTP client: every subcommand posts a JSON request to the
service and serializes the returned dataset to CSV or JSON.  By default the
service application runs in-process (no network socket); ``--server URL``
targets a running instance instead.

Exit codes: 0 success, 2 invalid parameters, 3 numerical failure,
4 oracle mismatch (|z| > 5 at any point).
"""

from __future__ import annotations

import argparse
import asyncio
import sys

import httpx

from .datasets import Dataset, parse_config_text, to_csv, to_json

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_ORACLE_MISMATCH = 4

_FLOAT_KEYS = {
    "r1", "t2", "r2", "sp", "sq", "nu", "delta_min", "delta_max",
    "nu_min", "nu_max", "tol",
}
_INT_KEYS = {"points", "steps", "seed", "samples", "partitions"}

_PRESETS = {
    "fig3": {"r1": 0.95, "t2": 0.003, "model": "exact-airy"},
    "fig6": {
        "r1": 0.95, "t2": 0.003, "model": "exact-airy", "nu": 6.0,
        "delta_min": -12.0, "delta_max": 12.0, "points": 2001,
    },
    "fig7": {
        "r1": 0.95, "t2": 0.003, "model": "exact-airy", "nu": 6.0,
        "sp": 0.5, "sq": 2.0,
        "delta_min": -12.0, "delta_max": 12.0, "points": 2001,
        "deltas": [-11.0, -5.94, -3.0, -0.48, 0.0, 0.48, 3.0, 5.94, 11.0],
    },
    "fig8": {
        "r1": 0.999, "t2": 0.0, "model": "exact-airy",
        "nu_min": 0.2, "nu_max": 10.0, "steps": 99,
    },
}

_COMMAND_PATHS = {
    "reflectance": "/v1/reflectance",
    "sweep": "/v1/sweep",
    "rotation": "/v1/rotation",
    "critical": "/v1/critical",
    "bifurcation": "/v1/bifurcation",
    "oracle": "/v1/oracle",
}

# Which resolved keys each command forwards to the service.
_COMMAND_KEYS = {
    "reflectance": {"r1", "t2", "r2", "model", "delta_min", "delta_max", "points"},
    "sweep": {"r1", "t2", "r2", "model", "sp", "sq", "nu", "delta_min", "delta_max", "points"},
    "rotation": {"r1", "t2", "r2", "model", "nu", "delta_min", "delta_max", "points"},
    "critical": {"r1", "t2", "r2", "model", "sp", "sq", "nu", "tol"},
    "bifurcation": {"r1", "t2", "r2", "model", "sp", "sq", "nu_min", "nu_max", "steps", "tol"},
    "oracle": {
        "r1", "t2", "r2", "model", "sp", "sq", "nu", "deltas",
        "delta_min", "delta_max", "points", "seed", "samples", "partitions",
    },
}


def _parse_deltas(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavnoise",
        description="Datasets for cavity phase-to-amplitude noise conversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, grid=True, state=False, nu=False, tol=False):
        p.add_argument("--r1", type=float, help="coupling mirror intensity reflectivity")
        loss = p.add_mutually_exclusive_group()
        loss.add_argument("--t2", type=float, help="output mirror transmission (loss), T2 = 1 - R2")
        loss.add_argument("--r2", type=float, help="output mirror intensity reflectivity (alias)")
        p.add_argument("--model", choices=["exact-airy", "lorentzian"])
        if state:
            p.add_argument("--sp", type=float, help="amplitude-quadrature noise power")
            p.add_argument("--sq", type=float, help="phase-quadrature noise power")
        if nu:
            p.add_argument("--nu", type=float, help="analysis frequency in bandwidth units")
        if grid:
            p.add_argument("--delta-min", dest="delta_min", type=float)
            p.add_argument("--delta-max", dest="delta_max", type=float)
            p.add_argument("--points", type=int)
        if tol:
            p.add_argument("--tol", type=float, help="detuning tolerance of the root finder")
        for preset in _PRESETS:
            p.add_argument(f"--{preset}", action="store_true", help=f"apply the {preset} preset")
        p.add_argument("--config", help="flat key=value file (or a dataset header) with defaults")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", help="output path; standard output when omitted")
        p.add_argument("--server", help="base URL of a running service; in-process when omitted")

    common(sub.add_parser("reflectance", help="|r|^2, unwrapped phase and |t|^2 over a grid"))
    common(sub.add_parser("sweep", help="reflected noise spectrum over a detuning grid"),
           state=True, nu=True)
    common(sub.add_parser("rotation", help="noise-ellipse rotation angle over a grid"), nu=True)
    common(sub.add_parser("critical", help="zero-derivative detunings of S_R"),
           grid=False, state=True, nu=True, tol=True)
    p = sub.add_parser("bifurcation", help="critical detunings versus analysis frequency")
    common(p, grid=False, state=True, tol=True)
    p.add_argument("--nu-min", dest="nu_min", type=float)
    p.add_argument("--nu-max", dest="nu_max", type=float)
    p.add_argument("--steps", type=int)
    p = sub.add_parser("oracle", help="Monte Carlo versus analytic S_R")
    common(p, state=True, nu=True)
    p.add_argument("--at", dest="deltas", type=_parse_deltas,
                   help="comma-separated detunings (overrides the grid)")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--partitions", type=int)
    return parser


def _coerce(key: str, raw: str):
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key == "deltas":
        return _parse_deltas(raw)
    return raw


def _resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < preset < explicit flags."""
    keys = _COMMAND_KEYS[args.command]
    resolved: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        for key, raw in parse_config_text(text).items():
            if key in keys:
                resolved[key] = _coerce(key, raw)
    for preset, values in _PRESETS.items():
        if getattr(args, preset, False):
            resolved.update({k: v for k, v in values.items() if k in keys})
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    if "r2" in resolved and "t2" in resolved:
        # An explicit alias on the command line wins over a configured loss.
        if getattr(args, "r2", None) is not None:
            resolved.pop("t2")
        else:
            resolved.pop("r2")
    return resolved


def _payload(command: str, resolved: dict) -> dict:
    cavity = {k: resolved[k] for k in ("r1", "t2", "r2", "model") if k in resolved}
    payload: dict = {"cavity": cavity} if cavity else {}
    if command in ("sweep", "critical", "bifurcation", "oracle"):
        state = {k: resolved[k] for k in ("sp", "sq") if k in resolved}
        if state:
            payload["state"] = state
    if command in ("reflectance", "sweep", "rotation", "oracle"):
        grid = {
            {"delta_min": "delta_min", "delta_max": "delta_max", "points": "points"}[k]: resolved[k]
            for k in ("delta_min", "delta_max", "points")
            if k in resolved
        }
        if grid:
            payload["grid"] = grid
    for key in ("nu", "tol", "nu_min", "nu_max", "steps", "seed", "samples", "partitions", "deltas"):
        if key in resolved:
            payload[key] = resolved[key]
    return payload


def _call_service(path: str, payload: dict, server: str | None) -> httpx.Response:
    timeout = httpx.Timeout(600.0)
    if server:
        with httpx.Client(base_url=server, timeout=timeout) as client:
            return client.post(path, json=payload)

    from .service import create_app

    async def _post():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://cavnoise.internal", timeout=timeout
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(_post())


def _write_output(dataset: Dataset, fmt: str, out: str | None):
    text = to_csv(dataset) if fmt == "csv" else to_json(dataset)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def oracle_exit_code(z_scores, warn=sys.stderr) -> int:
    """4 when any |z| exceeds 5; warnings listed for 3 < |z| <= 5."""
    suspicious = [z for z in z_scores if 3.0 < abs(z) <= 5.0]
    if suspicious:
        print(
            "warning: oracle z-scores beyond 3 sigma: "
            + ", ".join(f"{z:.2f}" for z in suspicious),
            file=warn,
        )
    return EXIT_ORACLE_MISMATCH if any(abs(z) > 5.0 for z in z_scores) else EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        resolved = _resolve(args)
    except (OSError, ValueError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        response = _call_service(_COMMAND_PATHS[args.command], _payload(args.command, resolved), args.server)
    except httpx.HTTPError as exc:
        print(f"error: service unreachable: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if response.status_code != 200:
        try:
            detail = response.json().get("detail")
        except ValueError:
            detail = response.text
        kind = detail.get("kind") if isinstance(detail, dict) else None
        message = detail.get("message") if isinstance(detail, dict) else detail
        print(f"error: {kind or response.status_code}: {message}", file=sys.stderr)
        if response.status_code in (400, 422):
            return EXIT_INVALID
        return EXIT_NUMERICAL

    body = response.json()
    dataset = Dataset(
        command=body["command"],
        columns=body["columns"],
        rows=body["rows"],
        metadata=body["metadata"],
    )
    _write_output(dataset, args.format, args.out)
    if args.command == "oracle":
        return oracle_exit_code([row["z_score"] for row in dataset.rows])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
