"""Monte Carlo validation of the analytic reflected-noise spectrum.

Independent oracle: Gaussian sideband fluctuations are pushed through the
four-term reflected-amplitude combination

    dp_R = e^{-i theta_R} r(delta+nu) a(nu)  + e^{+i theta_R} r*(delta-nu) a*(-nu)
         + e^{-i theta_R} t(delta+nu) v(nu)  + e^{+i theta_R} t*(delta-nu) v*(-nu)

term by term, never through the combined g-coefficients, and the spectrum
is estimated as the sample mean of |dp_R|^2.  One independent complex
sample pair per analysis-frequency bin realizes the unit-bin-width
discretization of the stationary-spectrum convention, so the quadrature
variances satisfy <|dp|^2> = S_p and <|dq|^2> = S_q directly.

Reproducibility contract
------------------------
Samples are generated in fixed-size internal partitions (blocks) of
``BLOCK_SAMPLES`` draws, each seeded as SeedSequence((seed, block_index)).
Worker parallelism only distributes whole blocks and the per-block moment
sums are always reduced in block order, so estimates are bit-identical for
any worker count, not just for repeated runs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cavity import (
    EPS_CARRIER,
    CavityParams,
    amplitude_reflectance,
    amplitude_transmittance,
    reflection_phase,
)
from .errors import ParameterError
from .transfer import SidebandState, _validate_nu

#: Samples per internally seeded block; fixed so estimates are independent
#: of how blocks are distributed over workers.
BLOCK_SAMPLES = 8192

MIN_SAMPLES = 100


@dataclass(frozen=True)
class SamplerConfig:
    """Inputs of one Monte Carlo spectrum estimate."""

    seed: int
    samples: int
    state: SidebandState
    delta: float
    nu: float
    cavity: CavityParams
    partitions: int = 1

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.samples, int) or self.samples < MIN_SAMPLES:
            raise ParameterError(f"samples must be an integer >= {MIN_SAMPLES}")
        if not isinstance(self.partitions, int) or self.partitions < 1:
            raise ParameterError("partitions must be a positive integer")
        _validate_nu(self.nu)
        if not math.isfinite(self.delta):
            raise ParameterError("delta must be finite")
        self.state.require_aligned()


@dataclass(frozen=True)
class SpectrumEstimate:
    """Sample mean, standard error and count of one estimated S_R point."""

    mean: float
    stderr: float
    samples: int


def _propagation_terms(delta, nu, cavity, eps_carrier=EPS_CARRIER):
    """The four complex factors of the reflected-amplitude combination."""
    theta = reflection_phase(delta, cavity, eps_carrier)
    phase = np.exp(-1j * theta)
    return (
        phase * amplitude_reflectance(delta + nu, cavity).value,
        np.conj(phase * amplitude_reflectance(delta - nu, cavity).value),
        phase * amplitude_transmittance(delta + nu, cavity).value,
        np.conj(phase * amplitude_transmittance(delta - nu, cavity).value),
    )


def _draw_pairs(rng, n, sp, sq):
    """n complex quadrature draws; rows p_r, p_i, q_r, q_i in fixed order."""
    z = rng.standard_normal((4, n))
    dp = math.sqrt(0.5 * sp) * (z[0] + 1j * z[1])
    dq = math.sqrt(0.5 * sq) * (z[2] + 1j * z[3])
    return dp, dq


def sample_sideband_pair(state: SidebandState, rng) -> tuple[complex, complex]:
    """Draw one (a(nu), a*(-nu)) sideband pair for the given quadrature powers.

    The four underlying real Gaussians have variance S_p/2, S_p/2, S_q/2,
    S_q/2, giving <|dp|^2> = S_p and <|dq|^2> = S_q.
    """
    state.require_aligned()
    dp, dq = _draw_pairs(rng, 1, state.sp, state.sq)
    return complex(0.5 * (dp[0] + 1j * dq[0])), complex(0.5 * (dp[0] - 1j * dq[0]))


def propagate_sample(
    pair: tuple[complex, complex],
    vacuum_pair: tuple[complex, complex],
    delta: float,
    nu: float,
    cavity: CavityParams,
    eps_carrier: float = EPS_CARRIER,
) -> complex:
    """Reflected amplitude-quadrature fluctuation for one sample, term by term."""
    c1, c2, c3, c4 = _propagation_terms(delta, nu, cavity, eps_carrier)
    return complex(
        c1 * pair[0] + c2 * pair[1] + c3 * vacuum_pair[0] + c4 * vacuum_pair[1]
    )


def _block_bounds(samples: int):
    n_blocks = (samples + BLOCK_SAMPLES - 1) // BLOCK_SAMPLES
    return [
        (b, min(BLOCK_SAMPLES, samples - b * BLOCK_SAMPLES)) for b in range(n_blocks)
    ]


def _block_moments(block_index, count, seed, sp, sq, terms):
    rng = np.random.default_rng(np.random.SeedSequence((seed, block_index)))
    # Fixed draw order per block: signal quadratures, then vacuum.
    dp, dq = _draw_pairs(rng, count, sp, sq)
    vp, vq = _draw_pairs(rng, count, 1.0, 1.0)
    c1, c2, c3, c4 = terms
    a_plus = 0.5 * (dp + 1j * dq)
    a_minus = 0.5 * (dp - 1j * dq)
    v_plus = 0.5 * (vp + 1j * vq)
    v_minus = 0.5 * (vp - 1j * vq)
    power = np.abs(c1 * a_plus + c2 * a_minus + c3 * v_plus + c4 * v_minus) ** 2
    return float(np.sum(power)), float(np.sum(power * power))


def estimate_noise(config: SamplerConfig, eps_carrier: float = EPS_CARRIER) -> SpectrumEstimate:
    """Estimate S_R(delta, nu) as the mean of |dp_R|^2 over config.samples draws."""
    terms = _propagation_terms(config.delta, config.nu, config.cavity, eps_carrier)
    bounds = _block_bounds(config.samples)
    sp, sq = config.state.sp, config.state.sq

    if config.partitions == 1:
        results = [
            _block_moments(b, n, config.seed, sp, sq, terms) for b, n in bounds
        ]
    else:
        chunks = np.array_split(np.arange(len(bounds)), config.partitions)
        with ThreadPoolExecutor(max_workers=config.partitions) as pool:
            futures = [
                pool.submit(
                    lambda idx: [
                        _block_moments(bounds[i][0], bounds[i][1], config.seed, sp, sq, terms)
                        for i in idx
                    ],
                    chunk,
                )
                for chunk in chunks
                if chunk.size
            ]
            parts = [f.result() for f in futures]
        # Chunks are contiguous and in order, so this reduction order is the
        # same as the single-partition one.
        results = [moment for part in parts for moment in part]

    total = 0.0
    total_sq = 0.0
    for s, s2 in results:
        total += s
        total_sq += s2
    n = config.samples
    mean = total / n
    variance = max(total_sq / n - mean * mean, 0.0) * n / (n - 1)
    return SpectrumEstimate(mean=mean, stderr=math.sqrt(variance / n), samples=n)
