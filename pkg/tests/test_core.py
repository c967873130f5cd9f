import math

import numpy as np
import pytest

from infostab.core import (
    H1,
    H2,
    Alpha,
    AlphaClass,
    ProbabilityVector,
    as_alpha,
    closed_bound_constant,
    k_alpha,
    t_alpha,
)
from infostab.errors import AlphaNearOne, OutOfDomain, TAlphaUndefined


def k_reference(a):
    # direct transcription of the three branches, no shared helpers
    if a == 0:
        return 63.0
    if a < 0:
        return (8 + 6 * 2**a + 2 ** (-a)) / abs(2 ** (1 - a) - 1)
    return (3 + 12 * 2**a + 32 * 3 ** (a + 1) / abs(2 ** (-a) - 1)) / abs(2 ** (1 - a) - 1)


class TestAlpha:
    def test_classes(self):
        assert Alpha(-0.5).cls is AlphaClass.NEGATIVE
        assert Alpha(0.0).cls is AlphaClass.ZERO
        assert Alpha(1e-13).cls is AlphaClass.ZERO
        assert Alpha(-1e-13).is_zero
        assert Alpha(2e-12).cls is AlphaClass.POSITIVE_NOT_ONE
        assert Alpha(3.0).cls is AlphaClass.POSITIVE_NOT_ONE

    @pytest.mark.parametrize("value", [1.0, 0.9995, 1.0009])
    def test_guard_band(self, value):
        with pytest.raises(AlphaNearOne):
            Alpha(value)

    def test_guard_is_configurable(self):
        assert Alpha(1.0005, guard=1e-4).value == 1.0005
        with pytest.raises(AlphaNearOne):
            as_alpha(1.0005, guard=1e-3)

    def test_non_finite(self):
        with pytest.raises(OutOfDomain):
            Alpha(math.nan)

    def test_as_alpha_passthrough(self):
        a = Alpha(2.0)
        assert as_alpha(a) is a
        assert float(as_alpha(-1)) == -1.0


class TestConstants:
    def test_k_zero(self):
        assert k_alpha(0) == 63.0

    def test_k_minus_one(self):
        assert k_alpha(-1) == pytest.approx(13 / 3, rel=1e-15)

    def test_k_two(self):
        assert k_alpha(2) == pytest.approx(2406.0, rel=1e-15)

    def test_t_two(self):
        assert t_alpha(2) == pytest.approx(300.0, rel=1e-15)

    def test_t_half(self):
        expected = 3 * 2**0.5 + 8 * 3**1.5 / abs(2**-0.5 - 1)
        assert t_alpha(0.5) == pytest.approx(expected, rel=1e-14)
        assert t_alpha(0.5) == pytest.approx(146.17, abs=5e-3)

    def test_k_t_relation_at_two(self):
        assert (4 * t_alpha(2) + 3) / abs(2 ** (1 - 2) - 1) == pytest.approx(k_alpha(2), rel=1e-15)

    @pytest.mark.parametrize("a", [0.0, -1e-12, -3.0])
    def test_t_undefined(self, a):
        with pytest.raises(TAlphaUndefined):
            t_alpha(a)

    @pytest.mark.parametrize("a", [-30.0, -4.2, -1.0, -1e-3, 0.25, 0.5, 2.0, 4.5])
    def test_k_matches_reference(self, a):
        assert k_alpha(a) == pytest.approx(k_reference(a), rel=1e-14)

    def test_k_negative_branch_below_fifteen(self):
        grid = -np.geomspace(30, 1e-6, 2_000)
        ks = np.array([k_alpha(a) for a in grid])
        assert ks.max() <= 15 + 1e-9
        assert np.all(np.diff(ks) > 0)  # increasing toward 0-

    def test_k_finite_positive(self):
        for a in np.linspace(-10, 10, 401):
            if abs(a - 1) < 1e-3:
                continue
            k = k_alpha(a)
            assert math.isfinite(k) and k > 0

    def test_closed_constant(self):
        assert closed_bound_constant(-1) == k_alpha(-1)
        assert closed_bound_constant(0) == 63.0
        assert closed_bound_constant(2) == max(2406.0, 301.0)
        assert closed_bound_constant(0.5) == max(k_alpha(0.5), t_alpha(0.5) + 1)


class TestProbabilityVector:
    def test_valid(self):
        p = ProbabilityVector([0.5, 0.25, 0.25])
        assert len(p) == 3
        np.testing.assert_array_equal(p.as_array(), [0.5, 0.25, 0.25])

    @pytest.mark.parametrize(
        "comps", [[1.0], [0.5, 0.5, 0.0], [0.6, 0.6], [0.5, 0.5 + 1e-10], [-0.1, 1.1]]
    )
    def test_invalid(self, comps):
        with pytest.raises(OutOfDomain):
            ProbabilityVector(comps)


class TestClosedSolutions:
    def test_h1_boundary(self):
        h = H1(2.0, 5.0, Alpha(-1.0))
        assert h(0.0) == 0.0
        assert h(1.0) == -3.0
        assert h(0.25) == pytest.approx(2 * 4 + 5 * (4 / 3) - 5)

    def test_h1_symmetric_vanishes_at_ends(self):
        h = H1(1.5, 1.5, Alpha(0.5))
        assert h(0.0) == 0.0 and h(1.0) == 0.0

    def test_h2(self):
        h = H2(c=0.3, f0=7.0, f1=-7.0)
        np.testing.assert_array_equal(h(np.array([0.0, 0.2, 0.9, 1.0])), [7.0, 0.3, 0.3, -7.0])

    def test_outside(self):
        with pytest.raises(OutOfDomain):
            H1(1, 1, Alpha(2))(1.5)
        with pytest.raises(OutOfDomain):
            H2(0, 0, 0)(-0.1)
