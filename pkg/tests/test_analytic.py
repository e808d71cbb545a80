import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringlat import (
    ContinuumSpec,
    DomainError,
    continuum_spectrum,
    crossing_frequency,
    current,
    energy,
    fast_mode_threshold,
    ground_winding,
    make_ring,
    max_winding_number,
    meanfield_energy_per_particle,
    polarized_current,
    polarized_current_limits,
    winding_state,
)

from conftest import omega_for
from oracles import (
    gap_minimum_omega,
    one_particle_matrix,
    twist_derivative_current,
)

SQRT2 = math.sqrt(2.0)


class TestEnergy:
    def test_zero_winding_is_drive_independent(self):
        for x in (0.0, 1.0, 7.5, -2.0):
            ring = make_ring(8).with_omega(omega_for(make_ring(8), x))
            assert energy(winding_state(ring, 0), ring) == pytest.approx(-2.0)

    def test_quarter_phase_kills_hopping_term(self):
        ring = make_ring(8, omega=3.1)
        expected = -2.0 * ring.omega * ring.k_factor
        assert energy(winding_state(ring, 2), ring) == pytest.approx(
            expected, abs=1e-12)

    def test_value_at_unit_drive(self):
        # Frozen expectation -2*sqrt(2); the dense matrix must agree.
        ring = make_ring(8).with_omega(omega_for(make_ring(8), 1.0))
        value = energy(winding_state(ring, 1), ring)
        assert value == pytest.approx(-2.0 * SQRT2, abs=1e-12)
        h = one_particle_matrix(8, ring.t, ring.omega, ring.k_factor)
        assert min(np.linalg.eigvalsh(h)) == pytest.approx(value, abs=1e-10)

    def test_every_winding_matches_dense_matrix(self):
        for n_sites in (4, 6, 8, 12, 16):
            base = make_ring(n_sites)
            for x in (0.0, 0.6, 2.9):
                ring = base.with_omega(omega_for(base, x))
                got = sorted(energy(winding_state(ring, n), ring)
                             for n in range(n_sites))
                h = one_particle_matrix(n_sites, ring.t, ring.omega,
                                        ring.k_factor)
                want = np.linalg.eigvalsh(h)
                assert np.max(np.abs(np.array(got) - want)) < 1e-10

    def test_foreign_state_rejected(self):
        ring8, ring6 = make_ring(8), make_ring(6)
        state = winding_state(ring6, 1)
        with pytest.raises(DomainError):
            energy(state, ring8)


class TestCurrent:
    def test_quarter_phase_saturates(self):
        for x in (0.0, 1.0, 10.0):
            base = make_ring(8)
            ring = base.with_omega(omega_for(base, x))
            assert current(winding_state(ring, 2), ring) == pytest.approx(
                2.0 * ring.t, abs=1e-12)

    def test_rest_state_lags_drive(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 1.0))
        assert current(winding_state(ring, 0), ring) == pytest.approx(
            -2.0 * ring.omega * ring.k_factor, abs=1e-12)

    def test_no_drive_no_current(self):
        ring = make_ring(8)
        assert current(winding_state(ring, 0), ring) == 0.0

    @pytest.mark.parametrize("n_sites", [4, 6, 8, 12])
    def test_matches_twist_derivative(self, n_sites):
        base = make_ring(n_sites)
        for x in (0.0, 0.8, 3.0):
            ring = base.with_omega(omega_for(base, x))
            for n in range(n_sites):
                reference = twist_derivative_current(
                    n_sites, n, ring.t, ring.omega, ring.k_factor)
                assert current(winding_state(ring, n), ring) == pytest.approx(
                    reference, abs=1e-6)

    def test_opposite_windings_cancel_at_rest(self):
        ring = make_ring(8)
        for n in range(1, 8):
            plus = current(winding_state(ring, n), ring)
            minus = current(winding_state(ring, 8 - n), ring)
            assert plus == pytest.approx(-minus, abs=1e-12)


class TestGroundWinding:
    def test_at_rest(self):
        assert ground_winding(make_ring(8)).n == 0

    def test_strong_drive_reaches_max_winding(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 10.0))
        assert ground_winding(ring).n == 2 == max_winding_number(ring)

    def test_between_crossings(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 1.0))
        assert ground_winding(ring).n == 1

    @pytest.mark.parametrize("n_sites", [4, 6, 8, 12, 16])
    def test_piecewise_constant_changes_only_at_crossings(self, n_sites):
        base = make_ring(n_sites)
        crossings = set()
        for n1 in range(n_sites):
            for n2 in range(n1 + 1, n_sites):
                value = crossing_frequency(n1, n2, base)
                if value is not None:
                    crossings.add(value)
        omegas = np.linspace(0.0, omega_for(base, 4.0), 1000)
        previous = ground_winding(base.with_omega(omegas[0])).n
        for lo, hi in zip(omegas[:-1], omegas[1:]):
            now = ground_winding(base.with_omega(float(hi))).n
            if now != previous:
                assert any(lo < c <= hi for c in crossings), (
                    f"ground winding changed in ({lo}, {hi}) with no "
                    f"crossing there")
            previous = now


class TestCrossingFrequency:
    def test_first_crossing_eight_sites(self):
        ring = make_ring(8)
        got = crossing_frequency(0, 1, ring)
        expected = (SQRT2 - 1.0) * ring.t / ring.k_factor
        assert got == pytest.approx(expected, rel=1e-12)
        # Independent check: the dense two-lowest-level gap vanishes there.
        oracle = gap_minimum_omega(8, ring.t, ring.k_factor,
                                   0.5 * expected, 1.5 * expected)
        assert got == pytest.approx(oracle, abs=1e-7)

    def test_second_crossing_eight_sites(self):
        ring = make_ring(8)
        got = crossing_frequency(1, 2, ring)
        assert got == pytest.approx((1.0 + SQRT2) * ring.t / ring.k_factor,
                                    rel=1e-12)

    def test_parallel_levels_never_cross(self):
        # Six sites: windings 1 and 2 share sin(phi), splitting is
        # drive-independent and equal to 2t.
        ring = make_ring(6)
        assert crossing_frequency(1, 2, ring) is None
        e1 = energy(winding_state(ring, 1), ring)
        e2 = energy(winding_state(ring, 2), ring)
        assert e2 - e1 == pytest.approx(2.0 * ring.t)

    def test_crossing_at_nonpositive_drive_reported_none(self):
        ring = make_ring(8)
        assert crossing_frequency(0, 7, ring) is None

    def test_same_winding_rejected(self):
        with pytest.raises(DomainError):
            crossing_frequency(1, 1, make_ring(8))

    @pytest.mark.parametrize("n_sites", [4, 8, 12, 16])
    def test_consecutive_crossings_increase(self, n_sites):
        ring = make_ring(n_sites)
        values = [crossing_frequency(n, n + 1, ring)
                  for n in range(n_sites // 4)]
        assert all(v is not None for v in values)
        assert values == sorted(values)
        assert len(set(values)) == len(values)


class TestFastModeThreshold:
    def test_four_sites_unit_ratio(self):
        ring = make_ring(4)
        assert fast_mode_threshold(ring) == pytest.approx(
            ring.t / ring.k_factor, rel=1e-12)

    def test_eight_sites(self):
        ring = make_ring(8)
        expected = (1.0 + SQRT2) * ring.t / ring.k_factor
        assert fast_mode_threshold(ring) == pytest.approx(expected, rel=1e-12)
        assert fast_mode_threshold(ring) == pytest.approx(
            crossing_frequency(1, 2, ring), rel=1e-12)

    def test_twelve_sites(self):
        ring = make_ring(12)
        expected = (2.0 + math.sqrt(3.0)) * ring.t / ring.k_factor
        assert fast_mode_threshold(ring) == pytest.approx(expected, rel=1e-12)
        assert fast_mode_threshold(ring) == pytest.approx(
            crossing_frequency(2, 3, ring), rel=1e-12)

    def test_requires_multiple_of_four(self):
        with pytest.raises(DomainError, match="n_sites"):
            fast_mode_threshold(make_ring(6))


class TestPolarizedCurrent:
    def test_two_fermions_negative_at_strong_drive(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 10.0))
        got = polarized_current(2, ring)
        # Lowest two windings at strong drive are 2 and 1:
        # J = 2t + sqrt(2)t - 10*sqrt(2)t.
        expected = (2.0 + SQRT2 - 10.0 * SQRT2) * ring.t
        assert got == pytest.approx(expected, abs=1e-9)
        assert got < 0

    def test_three_fermions_positive_and_drive_independent(self):
        base = make_ring(8)
        for x in (5.0, 10.0, 40.0):
            ring = base.with_omega(omega_for(base, x))
            got = polarized_current(3, ring)
            assert got == pytest.approx(2.0 * (1.0 + SQRT2) * ring.t,
                                        abs=1e-9)

    def test_single_fermion_reduces_to_ground_current(self):
        for x in (0.0, 0.9, 4.0):
            base = make_ring(8)
            ring = base.with_omega(omega_for(base, x))
            assert polarized_current(1, ring) == pytest.approx(
                current(ground_winding(ring), ring), abs=1e-12)

    def test_linear_in_drive_between_crossings(self):
        # Three-point collinearity inside a crossing-free window.
        base = make_ring(8)
        omegas = [omega_for(base, x) for x in (3.0, 3.2, 3.4)]
        values = [polarized_current(2, base.with_omega(w)) for w in omegas]
        slope_a = (values[1] - values[0]) / (omegas[1] - omegas[0])
        slope_b = (values[2] - values[1]) / (omegas[2] - omegas[1])
        assert slope_a == pytest.approx(slope_b, abs=1e-9)

    def test_limits_split_at_a_crossing(self):
        base = make_ring(8)
        ring = base.with_omega(crossing_frequency(1, 2, base))
        left, right, degenerate = polarized_current_limits(1, ring)
        assert degenerate
        assert left == pytest.approx(current(winding_state(ring, 1), ring),
                                     abs=1e-9)
        assert right == pytest.approx(current(winding_state(ring, 2), ring),
                                      abs=1e-9)

    def test_limits_agree_off_crossing(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 10.0))
        left, right, degenerate = polarized_current_limits(2, ring)
        assert not degenerate
        assert left == right == pytest.approx(polarized_current(2, ring))

    def test_count_bounds(self):
        with pytest.raises(DomainError):
            polarized_current(0, make_ring(8))
        with pytest.raises(DomainError):
            polarized_current(9, make_ring(8))


class TestMeanField:
    def test_zero_interaction_identity(self):
        base = make_ring(8)
        ring = base.with_omega(1.3)
        state = winding_state(ring, 3)
        assert meanfield_energy_per_particle(state, ring, 2.0, 0.0) == \
            energy(state, ring)

    def test_shift_cancels_in_differences(self):
        ring = make_ring(8, omega=2.2)
        s1, s2 = winding_state(ring, 1), winding_state(ring, 2)
        for u, rho in ((5.0, 2.0), (-3.0, 0.5)):
            diff = (meanfield_energy_per_particle(s1, ring, rho, u)
                    - meanfield_energy_per_particle(s2, ring, rho, u))
            assert diff == pytest.approx(energy(s1, ring) - energy(s2, ring),
                                         abs=1e-12)

    @given(u=st.floats(min_value=-10, max_value=10),
           density=st.floats(min_value=0, max_value=5),
           x=st.floats(min_value=0, max_value=12))
    @settings(max_examples=60)
    def test_argmin_matches_noninteracting(self, u, density, x):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, x))
        states = [winding_state(ring, n) for n in range(8)]
        free = min(states, key=lambda s: (energy(s, ring), s.n))
        dressed = min(states, key=lambda s: (
            meanfield_energy_per_particle(s, ring, density, u), s.n))
        assert dressed.n == free.n

    def test_strong_drive_argmin_example(self):
        base = make_ring(8)
        ring = base.with_omega(omega_for(base, 10.0))
        states = [winding_state(ring, n) for n in range(8)]
        best = min(states, key=lambda s: meanfield_energy_per_particle(
            s, ring, 2.0, 5.0))
        assert best.n == 2

    def test_negative_density_rejected(self):
        ring = make_ring(8)
        with pytest.raises(DomainError, match="density"):
            meanfield_energy_per_particle(winding_state(ring, 0), ring,
                                          -1.0, 1.0)


class TestContinuum:
    def test_rest_ground(self):
        assert continuum_spectrum(0, ContinuumSpec(1.0, 1.0, 0.0)) == 0.0

    def test_direct_substitution(self):
        assert continuum_spectrum(1, ContinuumSpec(1.0, 1.0, 1.0)) == \
            pytest.approx(-0.5)

    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_half_integer_drive_pairs_levels(self, k, l):
        spec = ContinuumSpec(mass=1.0, radius=1.0, omega=k + 0.5)
        assert continuum_spectrum(k + l + 1, spec) == \
            continuum_spectrum(k - l, spec)
