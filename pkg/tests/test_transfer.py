import numpy as np
import pytest

from cavnoise import (
    CavityParams,
    MirrorPair,
    NoiseEllipse,
    SidebandState,
    amplitude_reflectance,
    amplitude_transmittance,
    apply_sideband_phase,
    homodyne_reference,
    reflected_noise,
    reflection_phase,
    rotation_angle,
    transfer_coefficients,
)
from cavnoise.errors import CarrierExtinguishedError, ParameterError

from conftest import random_valid_tuple


def eq19_reflected_quadrature(pair, vacuum_pair, delta, nu, cavity):
    """Independent term-by-term evaluation of the reflected amplitude quadrature."""
    theta = reflection_phase(delta, cavity)
    return (
        np.exp(-1j * theta) * amplitude_reflectance(delta + nu, cavity).value * pair[0]
        + np.exp(1j * theta) * np.conj(amplitude_reflectance(delta - nu, cavity).value) * pair[1]
        + np.exp(-1j * theta) * amplitude_transmittance(delta + nu, cavity).value * vacuum_pair[0]
        + np.exp(1j * theta) * np.conj(amplitude_transmittance(delta - nu, cavity).value) * vacuum_pair[1]
    )


class TestSidebandState:
    def test_uncertainty_bound_enforced(self):
        with pytest.raises(ParameterError):
            SidebandState(sp=0.5, sq=0.5)

    def test_nonpositive_powers_rejected(self):
        with pytest.raises(ParameterError):
            SidebandState(sp=0.0, sq=2.0)
        with pytest.raises(ParameterError):
            SidebandState(sp=1.0, sq=-1.0)

    def test_minimum_uncertainty_allowed(self):
        state = SidebandState(sp=0.5, sq=2.0)
        assert state.sp * state.sq == pytest.approx(1.0)

    def test_tilted_ellipse_rejected_by_spectrum(self, reference_cavity):
        tilted = SidebandState(sp=0.5, sq=2.0, beta=0.3)
        with pytest.raises(ParameterError):
            reflected_noise(1.0, 6.0, tilted, reference_cavity)


class TestNoiseEllipse:
    def test_aligned_state_sorted_axes(self):
        ellipse = NoiseEllipse.from_state(SidebandState(sp=2.0, sq=0.5))
        assert (ellipse.s_x, ellipse.s_y) == (0.5, 2.0)
        assert ellipse.orientation == pytest.approx(np.pi / 2)

    def test_invalid_axes_rejected(self):
        with pytest.raises(ParameterError):
            NoiseEllipse(s_x=2.0, s_y=0.5, orientation=0.0)


class TestTransferCoefficients:
    def test_eq_basis_vector_oracle(self, reference_cavity):
        # Transfer of the quadrature basis vectors through the four-term
        # reflection must reproduce g_p and i*g_q.
        rng = np.random.default_rng(5)
        for _ in range(25):
            delta = rng.uniform(-12, 12)
            nu = rng.uniform(0.5, 10)
            tc = transfer_coefficients(delta, nu, reference_cavity)
            zero = (0.0, 0.0)
            # dp = 1, dq = 0  ->  pair = (1/2, 1/2)
            via_p = eq19_reflected_quadrature((0.5, 0.5), zero, delta, nu, reference_cavity)
            # dp = 0, dq = 1  ->  pair = (i/2, -i/2)
            via_q = eq19_reflected_quadrature((0.5j, -0.5j), zero, delta, nu, reference_cavity)
            assert via_p == pytest.approx(tc.g_p, abs=1e-12)
            assert via_q == pytest.approx(1j * tc.g_q, abs=1e-12)

    def test_vacuum_basis_vector_oracle(self, reference_cavity):
        tc = transfer_coefficients(2.3, 6.0, reference_cavity)
        zero = (0.0, 0.0)
        via_vp = eq19_reflected_quadrature(zero, (0.5, 0.5), 2.3, 6.0, reference_cavity)
        via_vq = eq19_reflected_quadrature(zero, (0.5j, -0.5j), 2.3, 6.0, reference_cavity)
        assert via_vp == pytest.approx(tc.g_vp, abs=1e-12)
        assert via_vq == pytest.approx(1j * tc.g_vq, abs=1e-12)

    def test_total_weight_is_one(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            delta, nu, _, cavity = random_valid_tuple(rng)
            tc = transfer_coefficients(delta, nu, cavity)
            assert tc.total_weight == pytest.approx(1.0, abs=1e-12)

    def test_far_off_resonance_identity(self):
        cavity = CavityParams(MirrorPair(0.95, 1.0))
        tc = transfer_coefficients(cavity.half_period / 2, 0.8, cavity)
        assert abs(tc.g_p) == pytest.approx(1.0, abs=1e-3)
        assert abs(tc.g_q) < 1e-2

    def test_lossless_cavity_has_no_vacuum_leak(self, high_finesse_lossless):
        tc = transfer_coefficients(1.7, 6.0, high_finesse_lossless)
        assert abs(tc.g_vp) == 0.0
        assert abs(tc.g_vq) == 0.0
        assert abs(tc.g_p) ** 2 + abs(tc.g_q) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_carrier_resonant_transfer(self, reference_cavity):
        # At resonance the carrier flips by pi and both sidebands reflect
        # with conjugate responses: no conversion, |g_p| = |r(nu)|.
        tc = transfer_coefficients(0.0, 6.0, reference_cavity)
        assert abs(tc.g_q) < 1e-14
        assert abs(tc.g_p) == pytest.approx(
            abs(amplitude_reflectance(6.0, reference_cavity).value), abs=1e-14
        )

    def test_sideband_resonant_conversion_at_large_nu(self):
        # One sideband resonant while carrier and other sideband stay far:
        # the single-sideband pi shift suppresses amplitude transfer.
        cavity = CavityParams(MirrorPair(0.999, 1.0))
        tc = transfer_coefficients(-50.0, 50.0, cavity)
        assert abs(tc.g_p) < 0.05

    def test_matched_carrier_propagates_error(self):
        matched = CavityParams(MirrorPair(0.9, 0.9))
        with pytest.raises(CarrierExtinguishedError):
            transfer_coefficients(0.0, 3.0, matched)


class TestReflectedNoise:
    def test_shot_noise_invariance(self, vacuum_state):
        rng = np.random.default_rng(3)
        for _ in range(100):
            delta, nu, _, cavity = random_valid_tuple(rng)
            assert reflected_noise(delta, nu, vacuum_state, cavity) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_far_off_resonance_reads_amplitude_noise(self, squeezed_state):
        cavity = CavityParams(MirrorPair(0.95, 1.0))
        s_r = reflected_noise(cavity.half_period / 2, 0.8, squeezed_state, cavity)
        assert s_r == pytest.approx(squeezed_state.sp, abs=1e-3)

    def test_carrier_resonance_restores_amplitude_noise(self, reference_cavity, squeezed_state):
        s_r = reflected_noise(0.0, 6.0, squeezed_state, reference_cavity)
        assert s_r == pytest.approx(squeezed_state.sp, rel=1e-2)

    def test_mirror_symmetry(self, reference_cavity, squeezed_state):
        for delta in (0.3, 1.1, 4.4, 9.7):
            plus = reflected_noise(delta, 6.0, squeezed_state, reference_cavity)
            minus = reflected_noise(-delta, 6.0, squeezed_state, reference_cavity)
            assert plus == pytest.approx(minus, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            delta, nu, state, cavity = random_valid_tuple(rng)
            s_r = reflected_noise(delta, nu, state, cavity)
            lo = min(state.sp, state.sq, 1.0) - 1e-12
            hi = max(state.sp, state.sq, 1.0) + 1e-12
            assert lo <= s_r <= hi

    def test_lossless_homodyne_equivalence(self, high_finesse_lossless, squeezed_state):
        for delta in np.linspace(-11.0, 11.0, 111):
            angle = rotation_angle(float(delta), 6.0, high_finesse_lossless)
            target = homodyne_reference(angle.magnitude, squeezed_state)
            s_r = reflected_noise(float(delta), 6.0, squeezed_state, high_finesse_lossless)
            assert s_r == pytest.approx(target, abs=1e-12)

    def test_sideband_resonant_loss_pulls_toward_shot_noise(self, squeezed_state):
        lossy = CavityParams(MirrorPair.from_loss(0.95, 0.003))
        lossless = CavityParams(MirrorPair(0.95, 1.0))
        s_lossy = reflected_noise(-6.0, 6.0, squeezed_state, lossy)
        s_lossless = reflected_noise(-6.0, 6.0, squeezed_state, lossless)
        assert abs(s_lossy - 1.0) < abs(s_lossless - 1.0)

    def test_carrier_conversion_peaks_insensitive_to_loss(self, squeezed_state):
        # With the carrier resonant the sidebands are fully reflected, so
        # loss barely lowers the conversion peaks near |delta| = 0.5: the
        # lossy peak value stays within 1e-3 of the lossless one (= sq).
        from cavnoise import find_critical_detunings

        lossy = CavityParams(MirrorPair.from_loss(0.95, 0.003))
        lossless = CavityParams(MirrorPair(0.95, 1.0))
        inner_lossy = min(find_critical_detunings(6.0, squeezed_state, lossy).deltas("full-conversion-max"))
        inner_lossless = min(find_critical_detunings(6.0, squeezed_state, lossless).deltas("full-conversion-max"))
        for sign in (1.0, -1.0):
            s_lossy = reflected_noise(sign * inner_lossy, 6.0, squeezed_state, lossy)
            s_lossless = reflected_noise(sign * inner_lossless, 6.0, squeezed_state, lossless)
            assert s_lossless == pytest.approx(squeezed_state.sq, abs=1e-9)
            assert s_lossy == pytest.approx(s_lossless, rel=1e-3)


class TestRotationAngle:
    def test_far_off_resonance_no_rotation(self):
        cavity = CavityParams(MirrorPair(0.95, 1.0))
        angle = rotation_angle(cavity.half_period / 2, 0.8, cavity)
        assert angle.magnitude < 1e-2
        assert abs(angle.signed) < 1e-2

    def test_odd_symmetry(self, high_finesse_lossless):
        for delta in (0.25, 0.5, 2.0, 7.0):
            plus = rotation_angle(delta, 6.0, high_finesse_lossless)
            minus = rotation_angle(-delta, 6.0, high_finesse_lossless)
            assert plus.signed == pytest.approx(-minus.signed, abs=1e-12)

    def test_no_rotation_at_exact_resonance(self, high_finesse_lossless, squeezed_state):
        angle = rotation_angle(0.0, 6.0, high_finesse_lossless)
        assert angle.signed == pytest.approx(0.0, abs=1e-9)
        assert angle.magnitude < 1e-9
        s_r = reflected_noise(0.0, 6.0, squeezed_state, high_finesse_lossless)
        assert s_r == pytest.approx(squeezed_state.sp, abs=1e-6)

    def test_full_conversion_at_half_bandwidth(self, high_finesse_lossless):
        angle = rotation_angle(-0.5, 6.0, high_finesse_lossless)
        assert angle.signed == pytest.approx(-np.pi / 2, abs=0.05)

    def test_magnitude_matches_signed_for_lossless(self, high_finesse_lossless):
        for delta in np.linspace(-11.0, 11.0, 89):
            tc = transfer_coefficients(float(delta), 6.0, high_finesse_lossless)
            angle = rotation_angle(float(delta), 6.0, high_finesse_lossless)
            assert abs(tc.g_p) == pytest.approx(abs(np.cos(angle.signed)), abs=1e-9)
            assert abs(tc.g_q) == pytest.approx(abs(np.sin(angle.signed)), abs=1e-9)


class TestHomodyneReference:
    def test_zero_angle_reads_sp(self, squeezed_state):
        assert homodyne_reference(0.0, squeezed_state) == 0.5

    def test_quarter_turn_reads_sq(self, squeezed_state):
        assert homodyne_reference(np.pi / 2, squeezed_state) == pytest.approx(2.0)

    def test_equal_mixture(self, squeezed_state):
        assert homodyne_reference(np.pi / 4, squeezed_state) == pytest.approx(1.25)


class TestSidebandPhaseShift:
    def test_identity(self):
        pair = (0.3 + 0.2j, -1.1 + 0.7j)
        assert apply_sideband_phase(0.0, pair) == pytest.approx(pair)

    def test_pi_swaps_quadratures_up_to_phase(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            dp, dq = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            new_dp, new_dq = apply_sideband_phase(np.pi, (dp, dq))
            assert abs(new_dp) == pytest.approx(abs(dq), abs=1e-12)
            assert abs(new_dq) == pytest.approx(abs(dp), abs=1e-12)

    def test_two_pi_restores_identity(self):
        pair = (1.5 - 0.4j, 0.9 + 2.2j)
        assert apply_sideband_phase(2 * np.pi, pair) == pytest.approx(pair, abs=1e-12)

    def test_matches_single_sideband_cavity_action(self):
        # Lossless cavity acting on one far-separated sideband realizes the
        # same amplitude-transfer magnitude as the pure phase-shift map,
        # |g_p| = |cos(theta/2)| for a sideband shift theta.
        cavity = CavityParams(MirrorPair(0.999, 1.0))
        nu = 50.0
        for delta in (-50.0, -49.0, -51.5):
            tc = transfer_coefficients(delta, nu, cavity)
            theta_shift = (
                reflection_phase(delta + nu, cavity)
                + reflection_phase(delta - nu, cavity)
                - 2 * reflection_phase(delta, cavity)
            )
            basis = apply_sideband_phase(theta_shift, (1.0, 0.0))
            assert abs(tc.g_p) == pytest.approx(abs(basis[0]), abs=5e-3)
