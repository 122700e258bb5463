"""Unit tests for bad set construction."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.enums import LatticeVector, MeasureMethod, TorusPoint
from src.errors import InvalidArgumentError, ResourceLimitError
from src.lattice import unimodular_completion
from src.setbuilder import (
    build_bad_set,
    calibrate_delta,
    certified_measure_lower_bound,
    contains_mesh,
    contains_points,
    delta,
    descriptor_from_dict,
    descriptor_to_dict,
    in_strip,
    measure_estimate,
    raster_error,
    pullback_contains,
    rho,
    set_contains,
    strip_contains,
    strip_family,
    tail_mass,
)


class TestDeltaSequence:
    """Test calibration of delta."""

    def setup_method(self):
        """Set up test fixtures."""
        self.seq = calibrate_delta(0.25)

    def test_sum_bound_matches_budget(self):
        """Test the certified sum equals 0.99 * sqrt(epsilon/2)."""
        assert self.seq.sum_upper_bound() == pytest.approx(0.99 * math.sqrt(0.125), rel=1e-12)

    def test_partial_sums_below_bound(self):
        """Test partial sums never exceed the certified bound."""
        assert self.seq.partial_sum(100_000) < self.seq.sum_upper_bound()

    def test_delta_decreasing(self):
        """Test delta is positive and decreasing."""
        values = [delta(self.seq, n) for n in range(1, 200)]
        assert all(v > 0 for v in values)
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_delta_rejects_zero(self):
        """Test delta(0) is undefined."""
        with pytest.raises(InvalidArgumentError):
            delta(self.seq, 0)

    def test_calibrate_rejects_bad_epsilon(self):
        """Test epsilon outside (0,1)."""
        for epsilon in (0.0, 1.0, 1.5, -0.1):
            with pytest.raises(InvalidArgumentError):
                calibrate_delta(epsilon)


class TestRho:
    """Test strip half-widths."""

    def setup_method(self):
        """Set up test fixtures."""
        self.desc = build_bad_set(0.25, 16)
        self.seq = self.desc.delta

    def test_unit_vector_uses_canonical_index(self):
        """Test rho((1,0)) = rho((-1,0)) = delta(1) * delta(4)."""
        expected = delta(self.seq, 1) * delta(self.seq, 4)
        assert rho(self.desc, LatticeVector.of(1, 0)) == pytest.approx(expected, rel=1e-15)
        assert rho(self.desc, LatticeVector.of(-1, 0)) == rho(self.desc, LatticeVector.of(1, 0))

    def test_multiple_of_generator(self):
        """Test rho((2,0)) = delta(2) * delta(4)."""
        expected = delta(self.seq, 2) * delta(self.seq, 4)
        assert rho(self.desc, LatticeVector.of(2, 0)) == pytest.approx(expected, rel=1e-15)

    def test_rho_outside_truncation_uses_formula(self):
        """Test rho beyond W is computed on demand."""
        expected = delta(self.seq, 17) * delta(self.seq, 4)
        assert rho(self.desc, LatticeVector.of(17, 0)) == pytest.approx(expected, rel=1e-12)

    def test_rho_symmetric(self):
        """Test rho_w = rho_-w for every cached w."""
        for (a, b), r in self.desc.rho_cache.items():
            assert self.desc.rho_cache[(-a, -b)] == r

    def test_rho_zero_rejected(self):
        """Test rho(0) is undefined."""
        with pytest.raises(InvalidArgumentError):
            rho(self.desc, LatticeVector.of(0, 0))

    def test_strip_count(self):
        """Test the number of distinct strips for W = 16."""
        assert len(self.desc.rho_cache) == 33 * 33 - 1
        assert len(self.desc.distinct_strips()) == (33 * 33 - 1) // 2


class TestBuildBadSet:
    """Test bad set construction."""

    def test_empty_family(self):
        """Test W = 0 has no strips and tail below epsilon."""
        desc = build_bad_set(0.3, 0)
        assert desc.rho_cache == {}
        assert desc.tail_bound < 0.3
        assert set_contains(desc, TorusPoint(x=0.0, y=0.0))

    def test_tail_decreases_with_truncation(self):
        """Test the tail shrinks as W grows."""
        tails = [build_bad_set(0.25, w).tail_bound for w in (1, 4, 16)]
        assert tails[0] > tails[1] > tails[2] > 0

    def test_tail_mass_matches_descriptor(self):
        """Test tail_mass recomputes the stored bound."""
        desc = build_bad_set(0.1, 8)
        assert tail_mass(desc) == pytest.approx(desc.tail_bound, rel=1e-12)

    def test_truncations_nested(self):
        """Test S_{W+1} is contained in S_W at sampled points."""
        rng = np.random.default_rng(9)
        xs, ys = rng.random(50_000), rng.random(50_000)
        for W in (1, 3, 6):
            outer = contains_points(build_bad_set(0.5, W), xs, ys)
            inner = contains_points(build_bad_set(0.5, W + 1), xs, ys)
            assert not np.any(inner & ~outer)
            assert build_bad_set(0.5, W).rho_cache.items() <= build_bad_set(0.5, W + 1).rho_cache.items()

    def test_certified_lower_bound(self):
        """Test the union bound keeps |S_W| >= 1 - epsilon."""
        for epsilon in (0.5, 0.25, 0.1):
            desc = build_bad_set(epsilon, 16)
            assert certified_measure_lower_bound(desc) >= 1 - epsilon

    def test_invalid_arguments(self):
        """Test epsilon and W preconditions."""
        with pytest.raises(InvalidArgumentError):
            build_bad_set(1.5, 4)
        with pytest.raises(InvalidArgumentError):
            build_bad_set(0.25, -1)


class TestMembership:
    """Test strip and set membership."""

    def setup_method(self):
        """Set up test fixtures."""
        self.family = strip_family({(1, 0): 0.25})

    def test_strip_contains(self):
        """Test the centered band |x| < 1/4."""
        w = LatticeVector.of(1, 0)
        assert strip_contains(self.family, w, TorusPoint(x=0.1, y=0.7))
        assert strip_contains(self.family, w, TorusPoint(x=0.9, y=0.2))
        assert not strip_contains(self.family, w, TorusPoint(x=0.5, y=0.5))

    def test_torus_point_reduced(self):
        """Test coordinates are reduced mod 1."""
        t = TorusPoint(x=1.25, y=-0.25)
        assert (t.x, t.y) == (0.25, 0.75)

    def test_mesh_agrees_with_scalar(self):
        """Test vectorized membership against set_contains."""
        desc = build_bad_set(0.5, 3)
        rng = np.random.default_rng(7)
        xs, ys = rng.random(40), rng.random(40)
        mesh = contains_mesh(desc, xs, ys)
        points = contains_points(desc, xs, ys)
        for i in range(40):
            assert points[i] == set_contains(desc, TorusPoint(x=xs[i], y=ys[i]))
            for j in range(0, 40, 5):
                assert mesh[i, j] == set_contains(desc, TorusPoint(x=xs[i], y=ys[j]))

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(-6, 6), st.integers(-6, 6),
        st.floats(0.0, 1.0, exclude_max=True), st.floats(0.0, 1.0, exclude_max=True),
    )
    def test_pullback_independent_of_xi(self, a, b, x, y):
        """Test the pull-back strip does not depend on the completing vector."""
        if a == 0 and b == 0:
            return
        w = LatticeVector.of(a, b)
        g = math.gcd(a, b)
        xi1 = unimodular_completion(LatticeVector.of(a // g, b // g))
        xi2 = xi1 + LatticeVector.of(a // g, b // g).scale(3)
        t = TorusPoint(x=x, y=y)
        expected = in_strip(w, 0.1, t)
        assert pullback_contains(w, xi1, 0.1, t) == expected
        assert pullback_contains(w, xi2, 0.1, t) == expected

    def test_pullback_rejects_dependent_xi(self):
        """Test xi parallel to w is rejected."""
        with pytest.raises(InvalidArgumentError):
            pullback_contains(LatticeVector.of(1, 2), LatticeVector.of(2, 4), 0.1, TorusPoint(x=0.1, y=0.1))


class TestStripFamily:
    """Test explicit strip families."""

    def test_both_signs_stored(self):
        """Test +-w share a half-width."""
        desc = strip_family({(2, 1): 0.05})
        assert desc.rho_cache == {(2, 1): 0.05, (-2, -1): 0.05}
        assert desc.truncation_W == 2
        assert desc.tail_bound == 0.0

    def test_conflicting_widths(self):
        """Test different widths for w and -w are rejected."""
        with pytest.raises(InvalidArgumentError):
            strip_family({(1, 0): 0.1, (-1, 0): 0.2})

    def test_width_range(self):
        """Test half-widths must lie below 1/2."""
        with pytest.raises(InvalidArgumentError):
            strip_family({(1, 0): 0.5})

    def test_rho_missing_strip(self):
        """Test rho for a vector outside the family."""
        with pytest.raises(InvalidArgumentError):
            rho(strip_family({(1, 0): 0.1}), LatticeVector.of(0, 1))


class TestMeasureEstimate:
    """Test grid and Monte-Carlo estimation."""

    def setup_method(self):
        """Set up test fixtures."""
        self.band = strip_family({(1, 0): 0.05})

    def test_full_torus(self):
        """Test the empty family measures 1 exactly."""
        estimate = measure_estimate(strip_family({}), MeasureMethod.GRID, n=64)
        assert estimate.value == 1.0
        assert estimate.error_bound == 0.0

    def test_grid_single_band(self):
        """Test a single band of width 0.1."""
        estimate = measure_estimate(self.band, MeasureMethod.GRID, n=1024)
        assert abs(estimate.value - 0.9) <= estimate.error_bound
        assert estimate.certified_lower_bound == pytest.approx(0.9)

    def test_grid_bad_set(self):
        """Test |S_W| >= 1 - epsilon on the grid."""
        desc = build_bad_set(0.25, 16)
        estimate = measure_estimate(desc, MeasureMethod.GRID, n=1024)
        assert estimate.value + estimate.error_bound >= 0.75
        assert estimate.value >= estimate.certified_lower_bound - estimate.error_bound

    def test_grid_single_strip_every_direction(self):
        """Test |I_w| = 2 rho on the grid for every 0 < |w|_inf <= 4."""
        for a in range(-4, 5):
            for b in range(-4, 5):
                if a == 0 and b == 0:
                    continue
                estimate = measure_estimate(strip_family({(a, b): 0.05}), MeasureMethod.GRID, n=1024)
                assert abs(estimate.value - 0.9) <= estimate.error_bound, (a, b)

    def test_grid_error_bound_finite_on_bad_set(self):
        """Test the bad set grid error stays below the included strip mass."""
        desc = build_bad_set(0.25, 16)
        estimate = measure_estimate(desc, MeasureMethod.GRID, n=1024)
        assert estimate.error_bound < 1.0
        assert estimate.error_bound == raster_error(desc, 1024)

    def test_montecarlo_deterministic(self):
        """Test equal seeds give equal estimates."""
        first = measure_estimate(self.band, MeasureMethod.MONTECARLO, samples=200_000, seed=3)
        second = measure_estimate(self.band, MeasureMethod.MONTECARLO, samples=200_000, seed=3)
        assert first.value == second.value
        assert abs(first.value - 0.9) <= first.error_bound

    def test_grid_resolution_checks(self):
        """Test grid preconditions and caps."""
        with pytest.raises(InvalidArgumentError):
            measure_estimate(self.band, MeasureMethod.GRID, n=100)
        with pytest.raises(InvalidArgumentError):
            measure_estimate(self.band, MeasureMethod.GRID, n=32)
        with pytest.raises(ResourceLimitError):
            measure_estimate(self.band, MeasureMethod.GRID, n=1 << 20)

    def test_sample_checks(self):
        """Test Monte-Carlo preconditions and caps."""
        with pytest.raises(InvalidArgumentError):
            measure_estimate(self.band, MeasureMethod.MONTECARLO, samples=100)
        with pytest.raises(ResourceLimitError):
            measure_estimate(self.band, MeasureMethod.MONTECARLO, samples=10 ** 12)


class TestSerialization:
    """Test descriptor JSON form."""

    def test_round_trip(self):
        """Test descriptors survive to_dict/from_dict unchanged."""
        desc = build_bad_set(0.25, 4)
        again = descriptor_from_dict(descriptor_to_dict(desc))
        assert again == desc

    def test_round_trip_strip_family(self):
        """Test explicit families keep delta unset."""
        desc = strip_family({(1, 2): 0.03})
        again = descriptor_from_dict(descriptor_to_dict(desc))
        assert again.delta is None
        assert again == desc

    def test_json_shape(self):
        """Test the rho list format."""
        data = descriptor_to_dict(strip_family({(1, 0): 0.1}))
        assert data["rho"] == [{"w": [-1, 0], "rho": 0.1}, {"w": [1, 0], "rho": 0.1}]
        assert data["tail_bound"] == 0.0
