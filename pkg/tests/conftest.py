import numpy as np
import pytest

from cavnoise import CavityParams, MirrorPair, SidebandState


@pytest.fixture
def reference_cavity():
    """The demo configuration: R1 = 0.95, loss T2 = 0.003 (R2 = 0.997)."""
    return CavityParams(MirrorPair.from_loss(0.95, 0.003))


@pytest.fixture
def lossless_cavity():
    return CavityParams(MirrorPair(0.95, 1.0))


@pytest.fixture
def high_finesse_lossless():
    return CavityParams(MirrorPair(0.999, 1.0))


@pytest.fixture
def high_finesse_lorentzian():
    return CavityParams(MirrorPair(0.999, 1.0), model="lorentzian")


@pytest.fixture
def squeezed_state():
    """Minimum-uncertainty state with phase noise above shot noise."""
    return SidebandState(sp=0.5, sq=2.0)


@pytest.fixture
def vacuum_state():
    return SidebandState(sp=1.0, sq=1.0)


def random_valid_tuple(rng, delta_span=12.0, nu_max=10.0):
    """One (delta, nu, state, cavity) tuple with both sidebands in window."""
    while True:
        R1 = rng.uniform(0.93, 0.9995)
        R2 = rng.uniform(0.93, 1.0)
        mirrors = MirrorPair(R1, R2)
        cavity = CavityParams(mirrors)
        delta = rng.uniform(-delta_span, delta_span)
        nu = rng.uniform(0.5, nu_max)
        if abs(delta) + nu > cavity.half_period - 1.0:
            continue
        phi = 2 * np.pi * delta / cavity.finesse
        r = (mirrors.r1 - mirrors.r2 * np.exp(1j * phi)) / (
            1 - mirrors.r1 * mirrors.r2 * np.exp(1j * phi)
        )
        if abs(r) < 1e-6:
            continue
        sp = rng.uniform(0.3, 3.0)
        sq = max(1.0 / sp, sp) * rng.uniform(1.0, 3.0)
        return delta, nu, SidebandState(sp=sp, sq=sq), cavity
